#pragma once

#include "locsvm/region.hpp"
#include "locsvm/types.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace locsvm {

/// exp(-||x - x'||^2 / gamma^2).
double gaussian_eval(const Point& x, const Point& xp, double gamma);

struct GaussianForm {
  double gamma = 1.0;
};
struct LinearForm {};
struct CustomForm {
  std::function<double(const Point&, const Point&)> fn;
  double sup_norm_bound = 0.0;
  std::string name;
};

using KernelForm = std::variant<GaussianForm, LinearForm, CustomForm>;

/// Symmetric positive semidefinite kernel on R^d, optionally restricted to a
/// region. Immutable after construction.
class Kernel {
 public:
  static Kernel gaussian(double gamma, int dim);
  static Kernel linear(int dim);
  /// The declared sup-norm bound is spot-checked on random points; a check
  /// value above the bound by more than 1e-12 is rejected.
  static Kernel custom(std::function<double(const Point&, const Point&)> fn, int dim,
                       double sup_norm_bound, std::string name = "custom");

  /// Evaluates k(x, x'); rejects dimension mismatches and, for restricted
  /// kernels, points outside the region.
  [[nodiscard]] double operator()(const Point& x, const Point& xp) const;
  /// No domain or dimension checks.
  [[nodiscard]] double eval_unchecked(const Point& x, const Point& xp) const;

  [[nodiscard]] Kernel restricted_to(const Region& region) const;
  [[nodiscard]] bool in_domain(const Point& x) const;
  [[nodiscard]] const Region* domain() const { return domain_.get(); }

  /// ||k||_inf = sup_x sqrt(k(x, x)) over the kernel's domain.
  [[nodiscard]] double sup_norm() const;

  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] const KernelForm& form() const { return form_; }
  [[nodiscard]] std::optional<double> gamma() const;
  [[nodiscard]] std::string name() const;

  /// Throws for custom kernels, which carry no serializable description.
  [[nodiscard]] nlohmann::json to_json() const;
  static Kernel from_json(const nlohmann::json& j);

 private:
  Kernel(KernelForm form, int dim) : form_(std::move(form)), dim_(dim) {}

  KernelForm form_;
  int dim_;
  std::shared_ptr<const Region> domain_;
};

/// Gram matrix M(i, j) = k(x_i, x_j). Only the upper triangle is evaluated
/// and mirrored, so the result is exactly symmetric.
Eigen::MatrixXd gram_matrix(std::span<const Point> points, const Kernel& kernel);

/// Gram matrix of the difference kernel scale_a * k_a - k_b.
Eigen::MatrixXd difference_gram(std::span<const Point> points, const Kernel& k_a, double scale_a,
                                const Kernel& k_b);

/// Smallest eigenvalue of a symmetric matrix; throws on non-finite input.
double min_eigenvalue(const Eigen::MatrixXd& symmetric);

/// Default PSD tolerance for an n-point Gram matrix: 1e-9 * n.
double default_psd_tolerance(std::size_t n);

/// (gamma0 / gamma_r)^(d/2); requires gamma0 >= gamma_r.
double beta_for_gaussian(double gamma0, double gamma_r, int d);

/// True iff beta^2 k_r - k_0 has smallest Gram eigenvalue >= -tol on every
/// point set. A missing tolerance means default_psd_tolerance(set size).
bool check_beta_dominance(const Kernel& k_r, const Kernel& k_0, double beta,
                          std::span<const std::vector<Point>> point_sets,
                          std::optional<double> tol_psd = std::nullopt);

struct KernelFamilyMember {
  std::string id;
  Kernel kernel;
  double beta;
};

/// Family of kernels of type beta: every member's RKHS contains the
/// reference RKHS with norm inflation at most beta.
class KernelFamily {
 public:
  KernelFamily(Kernel reference, std::vector<KernelFamilyMember> members);

  /// Finite Gaussian family; the reference bandwidth is the largest one.
  static KernelFamily gaussian(std::span<const double> bandwidths, int d);
  /// Gaussian family over the bandwidth interval (gamma_min, gamma_max].
  /// Members are materialized on demand by member_for_bandwidth().
  static KernelFamily gaussian_interval(double gamma_min, double gamma_max, int d);

  [[nodiscard]] const Kernel& reference() const { return reference_; }
  [[nodiscard]] std::size_t size() const { return members_.size(); }
  [[nodiscard]] const KernelFamilyMember& member(std::size_t r) const { return members_.at(r); }
  [[nodiscard]] const std::vector<KernelFamilyMember>& members() const { return members_; }
  [[nodiscard]] bool is_interval() const { return interval_.has_value(); }

  /// Gaussian member with the given bandwidth; only for interval families.
  [[nodiscard]] KernelFamilyMember member_for_bandwidth(double gamma) const;

  /// Runs check_beta_dominance for every member.
  [[nodiscard]] bool certify(std::span<const std::vector<Point>> point_sets,
                             std::optional<double> tol_psd = std::nullopt) const;

  [[nodiscard]] nlohmann::json to_json() const;

 private:
  struct Interval {
    double gamma_min;
    double gamma_max;
    int dim;
  };

  Kernel reference_;
  std::vector<KernelFamilyMember> members_;
  std::optional<Interval> interval_;
};

KernelFamily build_gaussian_family(std::span<const double> bandwidths, int d);

/// Random point sets for PSD spot checks: sizes in [2, max_size], points
/// uniform in [-spread, spread]^d.
std::vector<std::vector<Point>> random_point_sets(std::size_t count, std::size_t max_size, int d,
                                                  double spread, std::uint64_t seed);

}  // namespace locsvm
