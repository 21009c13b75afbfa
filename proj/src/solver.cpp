#include "locsvm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace locsvm {

nlohmann::json SolverOptions::to_json() const {
  return {{"tol_obj", tol_obj}, {"tol_grad", tol_grad}, {"max_iter", max_iter}, {"jitter", jitter}, {"kink_tol", kink_tol}};
}

SolverOptions SolverOptions::from_json(const nlohmann::json& j) {
  SolverOptions o;
  o.tol_obj = j.value("tol_obj", o.tol_obj);
  o.tol_grad = j.value("tol_grad", o.tol_grad);
  o.max_iter = j.value("max_iter", o.max_iter);
  o.jitter = j.value("jitter", o.jitter);
  o.kink_tol = j.value("kink_tol", o.kink_tol);
  return o;
}

LocalModel::LocalModel(std::vector<Point> support_points, Eigen::VectorXd coefficients, Kernel kernel, double lambda,
                       std::size_t region_index, FitDiagnostics diagnostics)
    : support_points_(std::move(support_points)),
      coefficients_(std::move(coefficients)),
      kernel_(std::move(kernel)),
      lambda_(lambda),
      region_index_(region_index),
      diagnostics_(diagnostics) {
  if (static_cast<Eigen::Index>(support_points_.size()) != coefficients_.size()) {
    throw std::invalid_argument("LocalModel: support points and coefficients differ in length");
  }
  if (!(lambda_ > 0.0)) throw std::invalid_argument("LocalModel: lambda must be positive");
  support_matrix_.resize(kernel_.dim(), static_cast<Eigen::Index>(support_points_.size()));
  for (std::size_t j = 0; j < support_points_.size(); ++j) {
    if (support_points_[j].size() != kernel_.dim()) throw std::invalid_argument("LocalModel: dimension mismatch");
    support_matrix_.col(static_cast<Eigen::Index>(j)) = support_points_[j];
  }
}

LocalModel LocalModel::zero(Kernel kernel, double lambda, std::size_t region_index) {
  return LocalModel({}, Eigen::VectorXd(0), std::move(kernel), lambda, region_index);
}

double LocalModel::operator()(const Point& x) const {
  if (!kernel_.in_domain(x)) throw std::out_of_range("predict_local: point outside the model's region");
  if (is_zero_model()) return 0.0;
  if (const auto gamma = kernel_.gamma()) {
    const Eigen::ArrayXd d2 = (support_matrix_.colwise() - x).colwise().squaredNorm().transpose().array();
    return (d2 * (-1.0 / (*gamma * *gamma))).exp().matrix().dot(coefficients_);
  }
  double s = 0.0;
  for (std::size_t j = 0; j < support_points_.size(); ++j) {
    s += coefficients_[static_cast<Eigen::Index>(j)] * kernel_.eval_unchecked(support_points_[j], x);
  }
  return s;
}

double predict_local(const LocalModel& model, const Point& x) { return model(x); }

double rkhs_norm(const LocalModel& model) {
  if (model.is_zero_model()) return 0.0;
  const Eigen::MatrixXd gram = gram_matrix(model.support_points(), model.kernel());
  const auto& a = model.coefficients();
  const double q = a.dot(gram * a);
  const double tol = default_psd_tolerance(model.support_points().size()) * a.squaredNorm();
  if (q < -tol) throw std::domain_error("rkhs_norm: negative quadratic form, kernel is not PSD");
  return std::sqrt(std::max(q, 0.0));
}

double empirical_risk(const Predictor& f, const Dataset& data, const DistanceBasedLoss& loss) {
  if (data.empty()) throw std::invalid_argument("empirical_risk: empty dataset");
  double s = 0.0;
  for (const auto& sample : data) s += loss(sample.y, f(sample.x));
  return s / static_cast<double>(data.size());
}

std::vector<Point> inputs_of(const Dataset& data) {
  std::vector<Point> xs;
  xs.reserve(data.size());
  for (const auto& s : data) xs.push_back(s.x);
  return xs;
}

Eigen::VectorXd responses_of(const Dataset& data) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i) y[static_cast<Eigen::Index>(i)] = data[i].y;
  return y;
}

namespace {

double mean_loss(const Eigen::VectorXd& y, const Eigen::VectorXd& fitted, const DistanceBasedLoss& loss) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) s += loss.psi(y[i] - fitted[i]);
  return s / static_cast<double>(y.size());
}

}  // namespace

double regularized_objective(const Eigen::MatrixXd& gram, const Eigen::VectorXd& y, const Eigen::VectorXd& alpha,
                             double lambda, const DistanceBasedLoss& loss) {
  const Eigen::VectorXd fitted = gram * alpha;
  return mean_loss(y, fitted, loss) + lambda * alpha.dot(fitted);
}

double stationarity_residual(const Eigen::MatrixXd& gram, const Eigen::VectorXd& y, const Eigen::VectorXd& alpha,
                             double lambda, const DistanceBasedLoss& loss, double kink_tol) {
  const auto n = static_cast<double>(y.size());
  const Eigen::VectorXd fitted = gram * alpha;
  Eigen::VectorXd g(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    // d/dt L(y, t) = -psi'(y - t); pick the element nearest -2 lambda n alpha_i.
    const Interval dpsi = loss.psi_subdifferential(y[i] - fitted[i], kink_tol);
    const Interval dt{-dpsi.hi, -dpsi.lo};
    g[i] = dt.clamp(-2.0 * lambda * n * alpha[i]);
  }
  return (gram * g / n + 2.0 * lambda * fitted).cwiseAbs().maxCoeff();
}

namespace {

LocalModel fit_least_squares(std::vector<Point> xs, const Eigen::VectorXd& y, const Kernel& kernel, double lambda,
                             const DistanceBasedLoss& loss, const SolverOptions& opts, std::size_t region) {
  const Eigen::MatrixXd gram = gram_matrix(xs, kernel);
  const auto n = gram.rows();
  Eigen::MatrixXd system = gram;
  system.diagonal().array() += static_cast<double>(n) * lambda;

  FitDiagnostics diag;
  Eigen::LLT<Eigen::MatrixXd> llt(system);
  const double base_jitter = (gram.trace() > 0.0 ? gram.trace() : 1.0) / static_cast<double>(n) * 1e-12;
  double jitter = base_jitter;
  while (llt.info() != Eigen::Success) {
    if (!opts.jitter || diag.jitter_steps > 3) {
      throw SolverError("fit_svm: Cholesky factorization failed beyond jitter repair",
                        std::numeric_limits<double>::infinity(), region);
    }
    Eigen::MatrixXd repaired = system;
    repaired.diagonal().array() += jitter;
    llt.compute(repaired);
    jitter *= 10.0;
    ++diag.jitter_steps;
  }
  Eigen::VectorXd alpha = llt.solve(y);
  if (!alpha.allFinite()) {
    throw SolverError("fit_svm: non-finite solution", std::numeric_limits<double>::infinity(), region);
  }
  diag.objective = regularized_objective(gram, y, alpha, lambda, loss);
  diag.stationarity = stationarity_residual(gram, y, alpha, lambda, loss, 0.0);
  diag.iterations = 1;
  return LocalModel(std::move(xs), std::move(alpha), kernel, lambda, region, diag);
}

// Dual of J for psi with conjugate supported on [lo, hi] (scaled by
// 1/(2 lambda n)) plus an l1 term eps * |u|:
//   min_alpha alpha' K alpha - 2 alpha' y + 2 eps ||alpha||_1,  alpha in box.
// The dual value at alpha is 2 lambda (alpha' y - eps ||alpha||_1) - lambda alpha' K alpha.
LocalModel fit_piecewise_linear(std::vector<Point> xs, const Eigen::VectorXd& y, const Kernel& kernel, double lambda,
                                const DistanceBasedLoss& loss, const SolverOptions& opts, std::size_t region) {
  const Eigen::MatrixXd gram = gram_matrix(xs, kernel);
  const auto n = gram.rows();
  const double scale = 1.0 / (2.0 * lambda * static_cast<double>(n));
  double lo = 0.0, hi = 0.0, eps = 0.0;
  if (loss.kind() == LossKind::pinball) {
    lo = (loss.tau() - 1.0) * scale;
    hi = loss.tau() * scale;
  } else {
    lo = -scale;
    hi = scale;
    eps = loss.epsilon();
  }

  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd fitted = Eigen::VectorXd::Zero(n);
  FitDiagnostics diag;
  double gap = std::numeric_limits<double>::infinity();

  for (int sweep = 1; sweep <= opts.max_iter; ++sweep) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double kii = gram(i, i);
      const double rest = fitted[i] - kii * alpha[i];
      const double target = y[i] - rest;
      double a;
      if (kii > 0.0) {
        const double shrunk = target > eps ? target - eps : (target < -eps ? target + eps : 0.0);
        a = std::clamp(shrunk / kii, lo, hi);
      } else {
        // Row i of a PSD Gram matrix vanishes with its diagonal; alpha_i
        // does not change f and only the linear dual terms remain.
        a = target > eps ? hi : (target < -eps ? lo : 0.0);
      }
      const double delta = a - alpha[i];
      if (delta != 0.0) {
        alpha[i] = a;
        fitted.noalias() += delta * gram.col(i);
      }
    }
    fitted.noalias() = gram * alpha;  // resynchronize accumulated round-off
    const double quad = alpha.dot(fitted);
    const double primal = mean_loss(y, fitted, loss) + lambda * quad;
    const double dual = 2.0 * lambda * (alpha.dot(y) - eps * alpha.lpNorm<1>()) - lambda * quad;
    gap = primal - dual;
    diag.iterations = sweep;
    diag.objective = primal;
    diag.duality_gap = gap;
    if (gap <= opts.tol_obj * std::max(primal, std::numeric_limits<double>::min())) {
      diag.stationarity = stationarity_residual(gram, y, alpha, lambda, loss, opts.kink_tol);
      if (diag.stationarity <= opts.tol_grad) {
        return LocalModel(std::move(xs), std::move(alpha), kernel, lambda, region, diag);
      }
    }
  }
  std::ostringstream msg;
  msg << "fit_svm: no convergence within " << opts.max_iter << " iterations (duality gap " << gap << ")";
  throw SolverError(msg.str(), gap, region);
}

}  // namespace

LocalModel fit_svm(const Dataset& data, const Kernel& kernel, double lambda, const DistanceBasedLoss& loss,
                   const SolverOptions& opts, std::size_t region_index) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("fit_svm: lambda must be positive");
  if (data.empty()) return LocalModel::zero(kernel, lambda, region_index);
  for (const auto& s : data) {
    if (!kernel.in_domain(s.x)) throw std::out_of_range("fit_svm: sample outside the kernel's domain");
    if (!std::isfinite(s.y)) throw std::domain_error("fit_svm: non-finite response");
  }
  std::vector<Point> xs = inputs_of(data);
  const Eigen::VectorXd y = responses_of(data);
  if (loss.kind() == LossKind::least_squares) {
    return fit_least_squares(std::move(xs), y, kernel, lambda, loss, opts, region_index);
  }
  return fit_piecewise_linear(std::move(xs), y, kernel, lambda, loss, opts, region_index);
}

}  // namespace locsvm
