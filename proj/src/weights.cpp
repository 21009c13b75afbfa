#include "locsvm/weights.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace locsvm {

WeightScheme::WeightScheme(std::shared_ptr<const Regionalization> regionalization, WeightKind kind, Bump bump,
                           double plateau_fraction)
    : regionalization_(std::move(regionalization)), kind_(kind), bump_(bump), plateau_fraction_(plateau_fraction) {
  if (!regionalization_) throw std::invalid_argument("WeightScheme: null regionalization");
  if (kind_ == WeightKind::indicator && !regionalization_->is_partition()) {
    throw std::invalid_argument("indicator weights require a partition");
  }
  if (!(plateau_fraction_ >= 0.0 && plateau_fraction_ < 1.0)) {
    throw std::invalid_argument("WeightScheme: plateau fraction must lie in [0, 1)");
  }
}

double WeightScheme::membership(const Region& region, const Point& x) const {
  const double depth = region.depth(x);
  if (bump_ == Bump::cone) return depth;
  return std::min(1.0, depth / (1.0 - plateau_fraction_));
}

std::vector<std::pair<std::size_t, double>> WeightScheme::nonzero(const Point& x) const {
  const auto regions = regionalization_->containing(x);
  if (regions.empty()) throw std::out_of_range("eval_weights: point lies in no region");
  std::vector<std::pair<std::size_t, double>> out;
  if (kind_ == WeightKind::indicator || regions.size() == 1) {
    out.emplace_back(regions.front(), 1.0);
    return out;
  }
  std::vector<double> raw(regions.size());
  double total = 0.0;
  for (std::size_t k = 0; k < regions.size(); ++k) {
    raw[k] = membership(regionalization_->region(regions[k]), x);
    total += raw[k];
  }
  if (total <= 0.0) {
    const double w = 1.0 / static_cast<double>(regions.size());
    for (std::size_t i : regions) out.emplace_back(i, w);
    return out;
  }
  for (std::size_t k = 0; k < regions.size(); ++k) {
    if (raw[k] > 0.0) out.emplace_back(regions[k], raw[k] / total);
  }
  return out;
}

std::vector<double> WeightScheme::operator()(const Point& x) const {
  std::vector<double> w(regionalization_->size(), 0.0);
  for (const auto& [i, v] : nonzero(x)) w[i] = v;
  return w;
}

nlohmann::json WeightScheme::to_json() const {
  if (kind_ == WeightKind::indicator) return {{"weights", "indicator"}};
  nlohmann::json j{{"weights", "membership"}, {"bump", bump_ == Bump::cone ? "cone" : "plateau"}};
  if (bump_ == Bump::plateau) j["plateau_fraction"] = plateau_fraction_;
  return j;
}

WeightScheme WeightScheme::from_json(const nlohmann::json& j, std::shared_ptr<const Regionalization> r) {
  const auto kind = j.value("weights", std::string("indicator"));
  if (kind == "indicator") return indicator_weights(std::move(r));
  if (kind == "membership") {
    const auto bump = j.value("bump", std::string("cone"));
    if (bump != "cone" && bump != "plateau") throw std::invalid_argument("unknown bump: " + bump);
    return WeightScheme(std::move(r), WeightKind::membership, bump == "cone" ? Bump::cone : Bump::plateau,
                        j.value("plateau_fraction", 0.5));
  }
  throw std::invalid_argument("unknown weight scheme: " + kind);
}

WeightScheme indicator_weights(std::shared_ptr<const Regionalization> r) {
  return WeightScheme(std::move(r), WeightKind::indicator);
}

WeightScheme normalized_membership_weights(std::shared_ptr<const Regionalization> r, Bump bump) {
  return WeightScheme(std::move(r), WeightKind::membership, bump);
}

std::vector<double> eval_weights(const WeightScheme& scheme, const Point& x) { return scheme(x); }

nlohmann::json WeightReport::to_json() const {
  return {{"w1_ok", w1_ok},
          {"w2_ok", w2_ok},
          {"w3_ok", w3_ok},
          {"max_sum_error", max_sum_error},
          {"max_range_violation", max_range_violation},
          {"max_outside_weight", max_outside_weight},
          {"probe_count", probe_count}};
}

WeightReport validate_weights(const WeightFunction& weights, const Regionalization& r, std::span<const Point> probes) {
  if (probes.empty()) throw std::invalid_argument("validate_weights: no probes");
  WeightReport rep;
  for (const auto& p : probes) {
    const auto regions = r.containing(p);
    if (regions.empty()) continue;
    ++rep.probe_count;
    const auto w = weights(p);
    if (w.size() != r.size()) throw std::invalid_argument("validate_weights: weight vector has wrong length");
    double sum = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      sum += w[i];
      rep.max_range_violation = std::max(rep.max_range_violation, std::max(-w[i], w[i] - 1.0));
      if (!std::binary_search(regions.begin(), regions.end(), i)) {
        rep.max_outside_weight = std::max(rep.max_outside_weight, std::abs(w[i]));
      }
    }
    rep.max_sum_error = std::max(rep.max_sum_error, std::abs(sum - 1.0));
  }
  rep.w1_ok = rep.max_range_violation <= 0.0;
  rep.w2_ok = rep.max_sum_error <= kWeightSumTolerance;
  rep.w3_ok = rep.max_outside_weight == 0.0;
  return rep;
}

WeightReport validate_weights(const WeightScheme& scheme, std::span<const Point> probes) {
  return validate_weights([&scheme](const Point& x) { return scheme(x); }, scheme.regionalization(), probes);
}

}  // namespace locsvm
