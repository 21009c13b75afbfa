#pragma once

#include "locsvm/kernels.hpp"
#include "locsvm/losses.hpp"
#include "locsvm/types.hpp"

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace locsvm {

struct SolverOptions {
  double tol_obj = 1e-9;
  double tol_grad = 1e-6;
  int max_iter = 50000;
  bool jitter = true;
  /// Residuals this close to a kink of psi count as sitting on it when a
  /// subgradient selection is checked.
  double kink_tol = 1e-8;

  [[nodiscard]] nlohmann::json to_json() const;
  static SolverOptions from_json(const nlohmann::json& j);
};

/// Thrown when a fit cannot be completed. Carries the last duality-gap
/// estimate and, for localized fits, the failing region.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double objective_gap, std::optional<std::size_t> region = std::nullopt)
      : std::runtime_error(what), objective_gap_(objective_gap), region_(region) {}

  [[nodiscard]] double objective_gap() const { return objective_gap_; }
  [[nodiscard]] std::optional<std::size_t> region() const { return region_; }

 private:
  double objective_gap_;
  std::optional<std::size_t> region_;
};

struct FitDiagnostics {
  int iterations = 0;
  double objective = 0.0;
  double duality_gap = 0.0;
  double stationarity = 0.0;
  int jitter_steps = 0;
};

/// f = sum_j alpha_j k(x_j, .) for one region. Immutable.
class LocalModel {
 public:
  LocalModel(std::vector<Point> support_points, Eigen::VectorXd coefficients, Kernel kernel, double lambda,
             std::size_t region_index, FitDiagnostics diagnostics = {});

  /// The zero function, used for regions without training samples.
  static LocalModel zero(Kernel kernel, double lambda, std::size_t region_index);

  [[nodiscard]] double operator()(const Point& x) const;

  [[nodiscard]] const std::vector<Point>& support_points() const { return support_points_; }
  [[nodiscard]] const Eigen::VectorXd& coefficients() const { return coefficients_; }
  [[nodiscard]] const Kernel& kernel() const { return kernel_; }
  [[nodiscard]] double lambda() const { return lambda_; }
  [[nodiscard]] bool is_zero_model() const { return support_points_.empty(); }
  [[nodiscard]] std::size_t region_index() const { return region_index_; }
  [[nodiscard]] const FitDiagnostics& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Point> support_points_;
  Eigen::MatrixXd support_matrix_;  // d x n copy for vectorized evaluation
  Eigen::VectorXd coefficients_;
  Kernel kernel_;
  double lambda_;
  std::size_t region_index_;
  FitDiagnostics diagnostics_;
};

/// Minimizes J(alpha) = (1/n) sum_i psi(y_i - (K alpha)_i) + lambda alpha' K alpha.
/// Least squares solves (K + n lambda I) alpha = y by Cholesky. The
/// piecewise-linear losses run exact coordinate descent on the dual box
/// problem and stop once the duality gap is below tol_obj (relative) and the
/// subgradient residual below tol_grad.
LocalModel fit_svm(const Dataset& data, const Kernel& kernel, double lambda, const DistanceBasedLoss& loss,
                   const SolverOptions& opts = {}, std::size_t region_index = 0);

double predict_local(const LocalModel& model, const Point& x);

/// sqrt(alpha' K alpha).
double rkhs_norm(const LocalModel& model);

/// Mean training loss of f on `data`; data must be nonempty.
double empirical_risk(const Predictor& f, const Dataset& data, const DistanceBasedLoss& loss);

std::vector<Point> inputs_of(const Dataset& data);
Eigen::VectorXd responses_of(const Dataset& data);

/// J(alpha) for a precomputed Gram matrix.
double regularized_objective(const Eigen::MatrixXd& gram, const Eigen::VectorXd& y, const Eigen::VectorXd& alpha,
                             double lambda, const DistanceBasedLoss& loss);

/// min over subgradient selections g_i of || (1/n) K g + 2 lambda K alpha ||_inf,
/// using the selection closest to -2 lambda n alpha.
double stationarity_residual(const Eigen::MatrixXd& gram, const Eigen::VectorXd& y, const Eigen::VectorXd& alpha,
                             double lambda, const DistanceBasedLoss& loss, double kink_tol);

}  // namespace locsvm
