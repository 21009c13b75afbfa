#pragma once

#include "locsvm/distributions.hpp"
#include "locsvm/losses.hpp"
#include "locsvm/region.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace locsvm {

/// Finite-grid verdict on an asymptotic condition: a strict monotone trend
/// over the last half of the grid plus a ratio threshold between the last
/// and first values.
struct ConditionVerdict {
  bool ok = false;
  bool trend_ok = false;
  bool threshold_ok = false;
  double ratio = 0.0;  // final / initial
  [[nodiscard]] nlohmann::json to_json() const;
};

inline constexpr double kShrinkRatio = 0.1;
inline constexpr double kGrowRatio = 10.0;
inline constexpr std::size_t kMinGridPoints = 4;

/// values[k] = max_i beta_i^2 lambda_i at the k-th grid point. Ok iff
/// strictly decreasing over the last half and final < 0.1 * initial.
ConditionVerdict check_condition_shrink(std::span<const double> values);

/// max_i beta_i^2 lambda_i over regions with counts[i] > 0 (all regions when
/// counts is empty).
double shrink_quantity(std::span<const double> betas, std::span<const double> lambdas,
                       std::span<const double> counts = {});

enum class GrowVariant { lp, risk, risk_partition, risk_unique_bayes };

std::string to_string(GrowVariant v);
GrowVariant grow_variant_from_string(const std::string& s);

/// Exponents actually used by a variant: lp and risk_unique_bayes drop p3*,
/// risk_partition uses p1* = max{2p, p^2} and p3* = 0.
GrowthExponents variant_exponents(const GrowthExponents& base, GrowVariant variant);

/// min_{i,j} lambda_j^{p3*} lambda_i^{p1*} d_i / A^{p2*} over regions with
/// d_i > 0. `exponents` must be growth_exponents(p, eps) for some p, eps.
double grow_quantity(std::span<const double> lambdas, std::span<const double> counts, double a_hat,
                     const GrowthExponents& exponents, GrowVariant variant);

struct GrowCheck {
  std::vector<double> values;
  ConditionVerdict verdict;
};

/// Per-grid-point lambdas, counts and A_hat. Ok iff strictly increasing over
/// the last half and final > 10 * initial.
GrowCheck check_condition_grow(const std::vector<std::vector<double>>& lambdas,
                               const std::vector<std::vector<double>>& counts, std::span<const double> a_hat,
                               const GrowthExponents& exponents, GrowVariant variant);

ConditionVerdict check_condition_grow_values(std::span<const double> values);

enum class NEffMode { global, region };

/// lambda = a * n_eff^{-b}, n_eff the sample size or the region count. Empty
/// regions use n_eff = 1, so every value lies in (0, a] within (0, C).
struct LambdaSchedule {
  double a = 0.5;
  double b = 0.2;
  double C = 1.0;
  NEffMode mode = NEffMode::global;

  [[nodiscard]] double at(double n_eff) const;
  /// One lambda per region.
  [[nodiscard]] std::vector<double> lambdas(std::size_t n, std::span<const std::size_t> counts) const;
  [[nodiscard]] std::vector<double> lambdas(std::size_t n, std::size_t regions) const;
  [[nodiscard]] nlohmann::json to_json() const;
  static LambdaSchedule from_json(const nlohmann::json& j);
};

/// Throws when a >= C or a, b, C are not positive.
LambdaSchedule make_schedule(double b, double a, double C, NEffMode mode = NEffMode::global);
/// Global-mode values a * n^{-b} on the grid.
std::vector<double> make_schedule(std::span<const double> n_grid, double b, double a, double C,
                                  NEffMode mode = NEffMode::global);

/// 2^6 .. 2^13.
std::vector<double> default_n_grid();
std::vector<double> power_of_two_grid(int lo_exp, int hi_exp);

struct ConditionReport {
  std::vector<double> n_grid;
  std::vector<double> shrink_values;
  std::vector<double> grow_values;
  std::vector<double> a_hat;
  std::optional<std::vector<double>> a_analytic;
  ConditionVerdict shrink;
  ConditionVerdict grow;
  GrowVariant variant = GrowVariant::lp;
  GrowthExponents exponents;

  [[nodiscard]] bool ok() const { return shrink.ok && grow.ok; }
  [[nodiscard]] nlohmann::json to_json() const;
  [[nodiscard]] std::string table() const;
};

/// Conditions along a grid for per-grid-point region counts and betas.
ConditionReport condition_report(std::span<const double> n_grid, const std::vector<std::vector<double>>& lambdas,
                                 const std::vector<std::vector<double>>& betas,
                                 const std::vector<std::vector<double>>& counts, std::span<const double> a_hat,
                                 const GrowthExponents& exponents, GrowVariant variant);

/// Conditions for a schedule when m(n) regions share the n samples evenly
/// (d_i = n / m, A_hat = m) and all betas equal `beta`.
ConditionReport nominal_condition_report(const LambdaSchedule& schedule, std::span<const double> n_grid,
                                         const std::function<std::size_t(double)>& regions_for_n, double beta,
                                         const GrowthExponents& exponents, GrowVariant variant);

struct MomentResult {
  double value = 0.0;
  double std_error = 0.0;
  bool infinite = false;
  bool zero_measure = false;
  [[nodiscard]] nlohmann::json to_json() const;
};

/// |P|_p = (int E[|Y|^p | x] dP^X(x))^{1/p}, analytic or by quadrature.
MomentResult averaged_moment(const SyntheticDistribution& dist, double p);
/// Monte Carlo estimate from a sample with delta-method standard error.
MomentResult averaged_moment(const Dataset& sample, double p);
/// |P_i|_p for P restricted to `region` and renormalized.
MomentResult local_moment(const SyntheticDistribution& dist, const Region& region, double p);
/// Monte Carlo estimate from n_mc draws of the restricted measure.
MomentResult local_moment_mc(const SyntheticDistribution& dist, const Region& region, double p, std::size_t n_mc,
                             std::uint64_t seed);
/// Monte Carlo estimate from the samples of `sample` lying in `region`.
MomentResult local_moment(const Dataset& sample, const Region& region, double p);

}  // namespace locsvm
