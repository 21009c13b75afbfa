#include "locsvm/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace locsvm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ConditionVerdict trend_verdict(std::span<const double> values, bool decreasing, double ratio_threshold) {
  if (values.size() < kMinGridPoints) throw std::invalid_argument("condition check needs at least 4 grid points");
  ConditionVerdict v;
  const std::size_t start = values.size() / 2;
  v.trend_ok = true;
  for (std::size_t k = start; k < values.size(); ++k) {
    if (k == 0) continue;
    const bool step_ok = decreasing ? values[k] < values[k - 1] : values[k] > values[k - 1];
    if (!step_ok) v.trend_ok = false;
  }
  v.ratio = values.back() / values.front();
  v.threshold_ok = decreasing ? values.back() < ratio_threshold * values.front()
                              : values.back() > ratio_threshold * values.front();
  v.ok = v.trend_ok && v.threshold_ok;
  return v;
}

bool same(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

}  // namespace

nlohmann::json ConditionVerdict::to_json() const {
  return {{"ok", ok}, {"trend_ok", trend_ok}, {"threshold_ok", threshold_ok}, {"ratio", ratio}};
}

ConditionVerdict check_condition_shrink(std::span<const double> values) {
  return trend_verdict(values, true, kShrinkRatio);
}

ConditionVerdict check_condition_grow_values(std::span<const double> values) {
  return trend_verdict(values, false, kGrowRatio);
}

double shrink_quantity(std::span<const double> betas, std::span<const double> lambdas, std::span<const double> counts) {
  if (betas.size() != lambdas.size() || (!counts.empty() && counts.size() != lambdas.size())) {
    throw std::invalid_argument("shrink_quantity: mismatched vector lengths");
  }
  double best = 0.0;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!counts.empty() && !(counts[i] > 0.0)) continue;
    best = std::max(best, betas[i] * betas[i] * lambdas[i]);
  }
  return best;
}

std::string to_string(GrowVariant v) {
  switch (v) {
    case GrowVariant::lp:
      return "lp";
    case GrowVariant::risk:
      return "risk";
    case GrowVariant::risk_partition:
      return "risk_partition";
    case GrowVariant::risk_unique_bayes:
      return "risk_unique_bayes";
  }
  return "?";
}

GrowVariant grow_variant_from_string(const std::string& s) {
  if (s == "lp") return GrowVariant::lp;
  if (s == "risk") return GrowVariant::risk;
  if (s == "risk_partition") return GrowVariant::risk_partition;
  if (s == "risk_unique_bayes") return GrowVariant::risk_unique_bayes;
  throw std::invalid_argument("unknown condition variant '" + s + "'");
}

GrowthExponents variant_exponents(const GrowthExponents& base, GrowVariant variant) {
  const GrowthExponents expected = growth_exponents(base.p, base.p2_epsilon);
  if (!same(base.p1_star, expected.p1_star) || !same(base.p2_star, expected.p2_star) ||
      !same(base.p3_star, expected.p3_star)) {
    throw std::invalid_argument("grow check: exponents do not match growth type p");
  }
  GrowthExponents e = expected;
  switch (variant) {
    case GrowVariant::lp:
    case GrowVariant::risk_unique_bayes:
      e.p3_star = 0.0;
      break;
    case GrowVariant::risk:
      break;
    case GrowVariant::risk_partition:
      e.p1_star = std::max(2.0 * e.p, e.p * e.p);
      e.p3_star = 0.0;
      break;
  }
  return e;
}

double grow_quantity(std::span<const double> lambdas, std::span<const double> counts, double a_hat,
                     const GrowthExponents& exponents, GrowVariant variant) {
  if (lambdas.size() != counts.size()) throw std::invalid_argument("grow_quantity: mismatched vector lengths");
  if (!(a_hat > 0.0)) throw std::invalid_argument("grow_quantity: A_hat must be positive");
  const GrowthExponents e = variant_exponents(exponents, variant);
  double min_lambda_j = kInf;
  double min_i = kInf;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(counts[i] > 0.0)) continue;
    min_lambda_j = std::min(min_lambda_j, std::pow(lambdas[i], e.p3_star));
    min_i = std::min(min_i, std::pow(lambdas[i], e.p1_star) * counts[i]);
  }
  if (min_i == kInf) return 0.0;
  return min_lambda_j * min_i / std::pow(a_hat, e.p2_star);
}

GrowCheck check_condition_grow(const std::vector<std::vector<double>>& lambdas,
                               const std::vector<std::vector<double>>& counts, std::span<const double> a_hat,
                               const GrowthExponents& exponents, GrowVariant variant) {
  if (lambdas.size() != counts.size() || lambdas.size() != a_hat.size()) {
    throw std::invalid_argument("check_condition_grow: mismatched vector lengths");
  }
  GrowCheck out;
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    out.values.push_back(grow_quantity(lambdas[k], counts[k], a_hat[k], exponents, variant));
  }
  out.verdict = check_condition_grow_values(out.values);
  return out;
}

double LambdaSchedule::at(double n_eff) const { return a * std::pow(std::max(n_eff, 1.0), -b); }

std::vector<double> LambdaSchedule::lambdas(std::size_t n, std::span<const std::size_t> counts) const {
  std::vector<double> out;
  out.reserve(counts.size());
  for (std::size_t c : counts) out.push_back(at(mode == NEffMode::global ? static_cast<double>(n) : static_cast<double>(c)));
  return out;
}

std::vector<double> LambdaSchedule::lambdas(std::size_t n, std::size_t regions) const {
  if (mode == NEffMode::region) throw std::logic_error("LambdaSchedule: region mode needs per-region counts");
  return std::vector<double>(regions, at(static_cast<double>(n)));
}

nlohmann::json LambdaSchedule::to_json() const {
  return {{"a", a}, {"b", b}, {"C", C}, {"n_eff", mode == NEffMode::global ? "global" : "region"}};
}

LambdaSchedule LambdaSchedule::from_json(const nlohmann::json& j) {
  const auto mode_name = j.value("n_eff", std::string("global"));
  NEffMode mode;
  if (mode_name == "global") {
    mode = NEffMode::global;
  } else if (mode_name == "region") {
    mode = NEffMode::region;
  } else {
    throw std::invalid_argument("unknown n_eff mode '" + mode_name + "'");
  }
  return make_schedule(j.at("b").get<double>(), j.at("a").get<double>(), j.value("C", 1.0), mode);
}

LambdaSchedule make_schedule(double b, double a, double C, NEffMode mode) {
  if (!(a > 0.0) || !(b > 0.0) || !(C > 0.0)) throw std::invalid_argument("make_schedule: a, b, C must be positive");
  if (a >= C) throw std::invalid_argument("make_schedule: a must be < C so that every lambda lies in (0, C)");
  return LambdaSchedule{a, b, C, mode};
}

std::vector<double> make_schedule(std::span<const double> n_grid, double b, double a, double C, NEffMode mode) {
  const LambdaSchedule s = make_schedule(b, a, C, mode);
  std::vector<double> out;
  for (double n : n_grid) out.push_back(s.at(n));
  return out;
}

std::vector<double> power_of_two_grid(int lo_exp, int hi_exp) {
  std::vector<double> out;
  for (int e = lo_exp; e <= hi_exp; ++e) out.push_back(std::ldexp(1.0, e));
  return out;
}

std::vector<double> default_n_grid() { return power_of_two_grid(6, 13); }

ConditionReport condition_report(std::span<const double> n_grid, const std::vector<std::vector<double>>& lambdas,
                                 const std::vector<std::vector<double>>& betas,
                                 const std::vector<std::vector<double>>& counts, std::span<const double> a_hat,
                                 const GrowthExponents& exponents, GrowVariant variant) {
  if (lambdas.size() != n_grid.size() || betas.size() != n_grid.size()) {
    throw std::invalid_argument("condition_report: one lambda and beta vector per grid point");
  }
  ConditionReport r;
  r.n_grid.assign(n_grid.begin(), n_grid.end());
  r.a_hat.assign(a_hat.begin(), a_hat.end());
  r.variant = variant;
  r.exponents = variant_exponents(exponents, variant);
  for (std::size_t k = 0; k < n_grid.size(); ++k) r.shrink_values.push_back(shrink_quantity(betas[k], lambdas[k], counts[k]));
  r.shrink = check_condition_shrink(r.shrink_values);
  auto g = check_condition_grow(lambdas, counts, a_hat, exponents, variant);
  r.grow_values = std::move(g.values);
  r.grow = g.verdict;
  return r;
}

ConditionReport nominal_condition_report(const LambdaSchedule& schedule, std::span<const double> n_grid,
                                         const std::function<std::size_t(double)>& regions_for_n, double beta,
                                         const GrowthExponents& exponents, GrowVariant variant) {
  std::vector<std::vector<double>> lambdas, betas, counts;
  std::vector<double> a_hat;
  for (double n : n_grid) {
    const std::size_t m = regions_for_n(n);
    if (m == 0) throw std::invalid_argument("nominal_condition_report: zero regions");
    const double d = n / static_cast<double>(m);
    counts.emplace_back(m, d);
    betas.emplace_back(m, beta);
    lambdas.emplace_back(m, schedule.at(schedule.mode == NEffMode::global ? n : d));
    a_hat.push_back(static_cast<double>(m));
  }
  return condition_report(n_grid, lambdas, betas, counts, a_hat, exponents, variant);
}

nlohmann::json ConditionReport::to_json() const {
  nlohmann::json j;
  j["n_grid"] = n_grid;
  j["shrink_values"] = shrink_values;
  j["grow_values"] = grow_values;
  j["A_hat"] = a_hat;
  if (a_analytic) j["A_analytic"] = *a_analytic;
  j["shrink"] = shrink.to_json();
  j["grow"] = grow.to_json();
  j["variant"] = to_string(variant);
  j["exponents"] = {{"p", exponents.p}, {"p1_star", exponents.p1_star}, {"p2_star", exponents.p2_star},
                    {"p3_star", exponents.p3_star}};
  j["ok"] = ok();
  j["note"] =
      "finite-grid heuristic: strict trend over the last half of the grid, shrink below 0.1x and growth beyond "
      "10x the first value; a limit is not certified";
  return j;
}

std::string ConditionReport::table() const {
  std::ostringstream out;
  out << std::setw(14) << "n" << std::setw(8) << "A_hat" << std::setw(16) << "max b^2 lam" << std::setw(16)
      << "min grow" << '\n';
  for (std::size_t k = 0; k < n_grid.size(); ++k) {
    out << std::setw(14) << std::setprecision(6) << n_grid[k] << std::setw(8) << a_hat[k] << std::setw(16)
        << std::setprecision(6) << shrink_values[k] << std::setw(16) << grow_values[k] << '\n';
  }
  out << "shrink: " << (shrink.ok ? "ok" : "not ok") << " (ratio " << shrink.ratio << ")\n";
  out << "grow[" << to_string(variant) << "]: " << (grow.ok ? "ok" : "not ok") << " (ratio " << grow.ratio << ")\n";
  return out.str();
}

nlohmann::json MomentResult::to_json() const {
  nlohmann::json j = {{"std_error", std_error}, {"infinite", infinite}, {"zero_measure", zero_measure}};
  j["value"] = infinite ? nlohmann::json("inf") : nlohmann::json(value);
  return j;
}

namespace {

void require_p(double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("moment: p must be >= 1");
}

MomentResult from_integral(double integral, double mass) {
  MomentResult r;
  if (!(mass > 0.0)) {
    r.zero_measure = true;
    return r;
  }
  if (std::isinf(integral)) {
    r.infinite = true;
    r.value = kInf;
    return r;
  }
  r.value = integral / mass;
  return r;
}

MomentResult mc_moment(const std::vector<double>& abs_y, double p) {
  MomentResult r;
  if (abs_y.empty()) {
    r.zero_measure = true;
    return r;
  }
  const double n = static_cast<double>(abs_y.size());
  double s = 0.0, s2 = 0.0;
  for (double a : abs_y) {
    const double v = std::pow(a, p);
    s += v;
    s2 += v * v;
  }
  const double mean = s / n;
  const double var = abs_y.size() > 1 ? std::max(0.0, (s2 - n * mean * mean) / (n - 1.0)) : 0.0;
  r.value = std::pow(mean, 1.0 / p);
  r.std_error = mean > 0.0 ? std::pow(mean, 1.0 / p - 1.0) / p * std::sqrt(var / n) : 0.0;
  return r;
}

}  // namespace

MomentResult averaged_moment(const SyntheticDistribution& dist, double p) {
  require_p(p);
  MomentResult r = from_integral(dist.moment_integral(p), 1.0);
  if (!r.infinite) r.value = std::pow(r.value, 1.0 / p);
  return r;
}

MomentResult averaged_moment(const Dataset& sample, double p) {
  require_p(p);
  std::vector<double> a;
  a.reserve(sample.size());
  for (const auto& s : sample) a.push_back(std::abs(s.y));
  return mc_moment(a, p);
}

MomentResult local_moment(const SyntheticDistribution& dist, const Region& region, double p) {
  require_p(p);
  const double mass = dist.marginal_mass(region);
  if (!(mass > 0.0)) return from_integral(0.0, 0.0);
  MomentResult r = from_integral(dist.moment_integral(p, &region), mass);
  if (!r.infinite) r.value = std::pow(r.value, 1.0 / p);
  return r;
}

MomentResult local_moment_mc(const SyntheticDistribution& dist, const Region& region, double p, std::size_t n_mc,
                             std::uint64_t seed) {
  require_p(p);
  if (!(dist.marginal_mass(region) > 0.0)) return from_integral(0.0, 0.0);
  return averaged_moment(dist.sample_in_region(region, n_mc, seed), p);
}

MomentResult local_moment(const Dataset& sample, const Region& region, double p) {
  require_p(p);
  std::vector<double> a;
  for (const auto& s : sample) {
    if (region.contains(s.x)) a.push_back(std::abs(s.y));
  }
  return mc_moment(a, p);
}

}  // namespace locsvm
