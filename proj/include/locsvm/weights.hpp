#pragma once

#include "locsvm/regionalize.hpp"

#include <json.hpp>

#include <functional>
#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace locsvm {

enum class WeightKind { indicator, membership };

/// Raw membership profile for normalized-membership weights. `cone` is
/// linear in the region depth; `plateau` equals 1 on the inner part of the
/// region and decays linearly to 0 at the boundary.
enum class Bump { cone, plateau };

/// Weight functions w_i obeying w_i in [0, 1], sum_i w_i = 1 and w_i = 0
/// outside region i.
class WeightScheme {
 public:
  WeightScheme(std::shared_ptr<const Regionalization> regionalization, WeightKind kind, Bump bump = Bump::cone,
               double plateau_fraction = 0.5);

  /// Dense weight vector of length m; throws when x lies in no region.
  [[nodiscard]] std::vector<double> operator()(const Point& x) const;

  /// Nonzero weights only, as (region index, weight) pairs.
  [[nodiscard]] std::vector<std::pair<std::size_t, double>> nonzero(const Point& x) const;

  [[nodiscard]] WeightKind kind() const { return kind_; }
  [[nodiscard]] Bump bump() const { return bump_; }
  [[nodiscard]] const Regionalization& regionalization() const { return *regionalization_; }
  [[nodiscard]] const std::shared_ptr<const Regionalization>& regionalization_ptr() const { return regionalization_; }

  [[nodiscard]] nlohmann::json to_json() const;
  static WeightScheme from_json(const nlohmann::json& j, std::shared_ptr<const Regionalization> r);

 private:
  [[nodiscard]] double membership(const Region& region, const Point& x) const;

  std::shared_ptr<const Regionalization> regionalization_;
  WeightKind kind_;
  Bump bump_;
  double plateau_fraction_;
};

/// Requires a partition.
WeightScheme indicator_weights(std::shared_ptr<const Regionalization> r);

/// w_i = m_i / sum_j m_j over containing regions; uniform over the
/// containing regions where every membership vanishes.
WeightScheme normalized_membership_weights(std::shared_ptr<const Regionalization> r, Bump bump = Bump::cone);

std::vector<double> eval_weights(const WeightScheme& scheme, const Point& x);

struct WeightReport {
  bool w1_ok = false;
  bool w2_ok = false;
  bool w3_ok = false;
  double max_sum_error = 0.0;
  double max_range_violation = 0.0;
  double max_outside_weight = 0.0;
  std::size_t probe_count = 0;

  [[nodiscard]] bool ok() const { return w1_ok && w2_ok && w3_ok; }
  [[nodiscard]] nlohmann::json to_json() const;
};

inline constexpr double kWeightSumTolerance = 1e-12;

using WeightFunction = std::function<std::vector<double>(const Point&)>;

/// Checks the three weight axioms on probes for an arbitrary weight map.
/// Probes in no region are skipped.
WeightReport validate_weights(const WeightFunction& weights, const Regionalization& r, std::span<const Point> probes);
WeightReport validate_weights(const WeightScheme& scheme, std::span<const Point> probes);

}  // namespace locsvm
