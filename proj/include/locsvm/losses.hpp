#pragma once

#include <json.hpp>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace locsvm {

enum class LossKind { least_squares, pinball, epsilon_insensitive };

/// Closed interval [lo, hi].
struct Interval {
  double lo;
  double hi;
  [[nodiscard]] bool contains(double v) const { return v >= lo && v <= hi; }
  [[nodiscard]] double clamp(double v) const { return v < lo ? lo : (v > hi ? hi : v); }
  [[nodiscard]] double midpoint() const { return 0.5 * (lo + hi); }
};

/// Convex distance-based loss L(y, t) = psi(y - t) with psi(0) = 0.
class DistanceBasedLoss {
 public:
  static DistanceBasedLoss least_squares();
  /// tau in (0, 1).
  static DistanceBasedLoss pinball(double tau);
  /// epsilon >= 0.
  static DistanceBasedLoss epsilon_insensitive(double epsilon);

  /// Representing function.
  [[nodiscard]] double psi(double r) const;
  /// Subdifferential of psi at r. Residuals within `kink_tol` of a kink are
  /// treated as sitting on it.
  [[nodiscard]] Interval psi_subdifferential(double r, double kink_tol = 0.0) const;
  /// Element of the subdifferential of psi; the midpoint at kinks.
  [[nodiscard]] double psi_subgradient(double r) const;

  /// L(y, t); throws on non-finite input.
  [[nodiscard]] double operator()(double y, double t) const;
  /// Element of the subdifferential of t -> L(y, t), i.e. -psi'(y - t).
  [[nodiscard]] double subgradient(double y, double t) const;

  [[nodiscard]] LossKind kind() const { return kind_; }
  [[nodiscard]] double growth_p() const { return kind_ == LossKind::least_squares ? 2.0 : 1.0; }
  [[nodiscard]] double tau() const { return tau_; }
  [[nodiscard]] double epsilon() const { return epsilon_; }
  /// Lipschitz constant of psi, absent for least squares.
  [[nodiscard]] std::optional<double> lipschitz() const;
  [[nodiscard]] std::string name() const;

  [[nodiscard]] nlohmann::json to_json() const;
  static DistanceBasedLoss from_json(const nlohmann::json& j);

 private:
  DistanceBasedLoss(LossKind kind, double tau, double epsilon) : kind_(kind), tau_(tau), epsilon_(epsilon) {}

  LossKind kind_;
  double tau_ = 0.5;
  double epsilon_ = 0.0;
};

/// Exponents entering the regularization conditions of both consistency
/// results, for a loss of growth type p.
struct GrowthExponents {
  double p = 1.0;
  double p1_star = 0.0;
  double p2_star = 0.0;
  double p3_star = 0.0;
  double p2_epsilon = 0.1;
};

inline constexpr double kDefaultP2Epsilon = 0.1;

/// p1* = max{p+1, p(p+1)/2}, p3* = max{p-1, p(p-1)/2},
/// p2* = max{2(p-1)/p, p-1} for p > 1 and p2_epsilon for p = 1.
GrowthExponents growth_exponents(double p, double p2_epsilon = kDefaultP2Epsilon);

struct GrowthCertificate {
  double p = 0.0;
  double c_upper = 0.0;
  double c_lower = 0.0;
  bool upper_ok = false;
  bool lower_ok = false;
  bool ok = false;
};

/// Symmetric grid on [-1000, 1000] with dense spacing near zero.
std::vector<double> default_growth_grid();

/// Grid-certifies upper and lower growth of type p (default: the loss's own
/// growth type). c_upper = max psi(r)/(|r|^p + 1) and c_lower =
/// min (psi(r) + 1)/|r|^p over the grid. A constant is accepted when it is
/// finite, positive, and stable under grid doubling: the extremum over the
/// full grid differs from the one over |r| <= R/2 by less than 10%.
GrowthCertificate verify_growth_type(const DistanceBasedLoss& loss, std::span<const double> grid,
                                     std::optional<double> p = std::nullopt);

}  // namespace locsvm
