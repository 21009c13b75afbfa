#include "locsvm/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace locsvm {

DistanceBasedLoss DistanceBasedLoss::least_squares() { return {LossKind::least_squares, 0.5, 0.0}; }

DistanceBasedLoss DistanceBasedLoss::pinball(double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("pinball loss: tau must lie in (0, 1)");
  return {LossKind::pinball, tau, 0.0};
}

DistanceBasedLoss DistanceBasedLoss::epsilon_insensitive(double epsilon) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("epsilon-insensitive loss: epsilon must be finite and >= 0");
  }
  return {LossKind::epsilon_insensitive, 0.5, epsilon};
}

double DistanceBasedLoss::psi(double r) const {
  switch (kind_) {
    case LossKind::least_squares:
      return r * r;
    case LossKind::pinball:
      return r >= 0.0 ? tau_ * r : (tau_ - 1.0) * r;
    case LossKind::epsilon_insensitive:
      return std::max(0.0, std::abs(r) - epsilon_);
  }
  return 0.0;
}

Interval DistanceBasedLoss::psi_subdifferential(double r, double kink_tol) const {
  switch (kind_) {
    case LossKind::least_squares:
      return {2.0 * r, 2.0 * r};
    case LossKind::pinball:
      if (std::abs(r) <= kink_tol) return {tau_ - 1.0, tau_};
      return r > 0.0 ? Interval{tau_, tau_} : Interval{tau_ - 1.0, tau_ - 1.0};
    case LossKind::epsilon_insensitive: {
      if (epsilon_ == 0.0 && std::abs(r) <= kink_tol) return {-1.0, 1.0};
      if (std::abs(r - epsilon_) <= kink_tol) return {0.0, 1.0};
      if (std::abs(r + epsilon_) <= kink_tol) return {-1.0, 0.0};
      if (r > epsilon_) return {1.0, 1.0};
      if (r < -epsilon_) return {-1.0, -1.0};
      return {0.0, 0.0};
    }
  }
  return {0.0, 0.0};
}

double DistanceBasedLoss::psi_subgradient(double r) const { return psi_subdifferential(r).midpoint(); }

double DistanceBasedLoss::operator()(double y, double t) const {
  if (!std::isfinite(y) || !std::isfinite(t)) throw std::domain_error("loss: non-finite input");
  return psi(y - t);
}

double DistanceBasedLoss::subgradient(double y, double t) const { return -psi_subgradient(y - t); }

std::optional<double> DistanceBasedLoss::lipschitz() const {
  switch (kind_) {
    case LossKind::least_squares:
      return std::nullopt;
    case LossKind::pinball:
      return std::max(tau_, 1.0 - tau_);
    case LossKind::epsilon_insensitive:
      return 1.0;
  }
  return std::nullopt;
}

std::string DistanceBasedLoss::name() const {
  std::ostringstream s;
  switch (kind_) {
    case LossKind::least_squares:
      return "least_squares";
    case LossKind::pinball:
      s << "pinball(" << tau_ << ")";
      return s.str();
    case LossKind::epsilon_insensitive:
      s << "epsilon_insensitive(" << epsilon_ << ")";
      return s.str();
  }
  return "unknown";
}

nlohmann::json DistanceBasedLoss::to_json() const {
  switch (kind_) {
    case LossKind::least_squares:
      return {{"loss", "least_squares"}};
    case LossKind::pinball:
      return {{"loss", "pinball"}, {"tau", tau_}};
    case LossKind::epsilon_insensitive:
      return {{"loss", "epsilon_insensitive"}, {"epsilon", epsilon_}};
  }
  return {};
}

DistanceBasedLoss DistanceBasedLoss::from_json(const nlohmann::json& j) {
  const auto name = j.at("loss").get<std::string>();
  if (name == "least_squares") return least_squares();
  if (name == "pinball") return pinball(j.at("tau").get<double>());
  if (name == "epsilon_insensitive") return epsilon_insensitive(j.at("epsilon").get<double>());
  throw std::invalid_argument("unknown loss: " + name);
}

GrowthExponents growth_exponents(double p, double p2_epsilon) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("growth_exponents: p must be >= 1");
  GrowthExponents e;
  e.p = p;
  e.p2_epsilon = p2_epsilon;
  e.p1_star = std::max(p + 1.0, p * (p + 1.0) / 2.0);
  e.p3_star = std::max(p - 1.0, p * (p - 1.0) / 2.0);
  if (p > 1.0) {
    e.p2_star = std::max(2.0 * (p - 1.0) / p, p - 1.0);
  } else {
    if (!(p2_epsilon > 0.0)) throw std::invalid_argument("growth_exponents: p2_epsilon must be positive for p = 1");
    e.p2_star = p2_epsilon;
  }
  return e;
}

std::vector<double> default_growth_grid() {
  std::vector<double> grid;
  for (int k = -2000; k <= 2000; ++k) grid.push_back(0.5 * k);
  for (int k = -100; k <= 100; ++k) grid.push_back(0.001 * k);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

GrowthCertificate verify_growth_type(const DistanceBasedLoss& loss, std::span<const double> grid,
                                     std::optional<double> p_opt) {
  GrowthCertificate cert;
  cert.p = p_opt.value_or(loss.growth_p());
  const double p = cert.p;
  if (grid.empty()) return cert;
  double radius = 0.0;
  for (double r : grid) radius = std::max(radius, std::abs(r));

  double upper_full = 0.0, upper_inner = 0.0;
  double lower_full = std::numeric_limits<double>::infinity(), lower_inner = lower_full;
  for (double r : grid) {
    const double psi = loss.psi(r);
    const double ar = std::abs(r);
    const bool inner = ar <= 0.5 * radius;
    const double up = psi / (std::pow(ar, p) + 1.0);
    upper_full = std::max(upper_full, up);
    if (inner) upper_inner = std::max(upper_inner, up);
    if (ar > 0.0) {
      const double low = (psi + 1.0) / std::pow(ar, p);
      lower_full = std::min(lower_full, low);
      if (inner) lower_inner = std::min(lower_inner, low);
    }
  }
  constexpr double kStability = 0.1;
  cert.c_upper = upper_full;
  cert.c_lower = lower_full;
  cert.upper_ok = std::isfinite(upper_full) && upper_inner > 0.0 && upper_full <= (1.0 + kStability) * upper_inner;
  cert.lower_ok = std::isfinite(lower_full) && lower_full > 0.0 && lower_inner <= (1.0 + kStability) * lower_full;
  cert.ok = cert.upper_ok && cert.lower_ok;
  return cert;
}

}  // namespace locsvm
