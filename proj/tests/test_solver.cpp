#include "locsvm/rng.hpp"
#include "locsvm/solver.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace locsvm;

namespace {

Dataset noisy_sine_data(std::size_t n, int d, std::uint64_t seed) {
  CounterRng rng(seed);
  Dataset data;
  for (std::size_t i = 0; i < n; ++i) {
    Point x(d);
    for (int k = 0; k < d; ++k) x[k] = rng.uniform(-2.0, 2.0);
    data.push_back({x, std::sin(2.0 * x[0]) + 0.3 * rng.normal()});
  }
  return data;
}

// Plain conjugate gradient on the quadratic J, independent of the solver's
// linear-system path: H = (2/n) K^2 + 2 lambda K, b = (2/n) K y.
Eigen::VectorXd cg_minimize(const Eigen::MatrixXd& k, const Eigen::VectorXd& y, double lambda) {
  const double n = static_cast<double>(y.size());
  const Eigen::MatrixXd h = (2.0 / n) * k * k + 2.0 * lambda * k;
  const Eigen::VectorXd b = (2.0 / n) * k * y;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(y.size());
  Eigen::VectorXd r = b, p = r;
  for (int restart = 0; restart < 20; ++restart) {
    r = b - h * x;
    p = r;
    for (Eigen::Index it = 0; it < 4 * y.size(); ++it) {
      const double rr = r.squaredNorm();
      if (rr < 1e-300) break;
      const Eigen::VectorXd hp = h * p;
      const double denom = p.dot(hp);
      if (!(denom > 0.0)) break;
      const double step = rr / denom;
      x += step * p;
      r -= step * hp;
      p = r + (r.squaredNorm() / rr) * p;
    }
  }
  return x;
}

const std::vector<DistanceBasedLoss>& all_losses() {
  static const std::vector<DistanceBasedLoss> losses = {
      DistanceBasedLoss::least_squares(), DistanceBasedLoss::pinball(0.5), DistanceBasedLoss::pinball(0.8),
      DistanceBasedLoss::epsilon_insensitive(0.1)};
  return losses;
}

}  // namespace

TEST(FitSvm, SingleSampleLeastSquares) {
  const Point x0 = make_point({0.3});
  const Dataset data = {{x0, 1.0}};
  const auto m = fit_svm(data, Kernel::gaussian(1.0, 1), 1.0, DistanceBasedLoss::least_squares());
  ASSERT_EQ(m.coefficients().size(), 1);
  EXPECT_NEAR(m.coefficients()[0], 0.5, 1e-15);
  EXPECT_NEAR(predict_local(m, x0), 0.5, 1e-15);
  EXPECT_NEAR(rkhs_norm(m), 0.5, 1e-15);
}

TEST(FitSvm, EmptyDataGivesZeroModel) {
  for (const auto& loss : all_losses()) {
    const auto m = fit_svm({}, Kernel::gaussian(1.0, 2), 0.1, loss, {}, 3);
    EXPECT_TRUE(m.is_zero_model());
    EXPECT_EQ(m.region_index(), 3u);
    EXPECT_EQ(predict_local(m, make_point({0.4, 9.0})), 0.0);
    EXPECT_EQ(rkhs_norm(m), 0.0);
  }
}

TEST(FitSvm, DuplicatedInputPinballMatchesScanOracle) {
  const Dataset data = {{make_point({0.0}), -1.0}, {make_point({0.0}), 1.0}};
  const double lambda = 0.1;
  const auto loss = DistanceBasedLoss::pinball(0.5);
  const auto m = fit_svm(data, Kernel::gaussian(1.0, 1), lambda, loss);
  // K is all ones, so f(0) = s = alpha_1 + alpha_2 and ||f||^2 = s^2.
  double best = INFINITY;
  for (int k = -400000; k <= 400000; ++k) {
    const double s = 1e-5 * k;
    best = std::min(best, 0.5 * (loss.psi(-1.0 - s) + loss.psi(1.0 - s)) + lambda * s * s);
  }
  const Eigen::MatrixXd gram = gram_matrix(inputs_of(data), m.kernel());
  const double obj = regularized_objective(gram, responses_of(data), m.coefficients(), lambda, loss);
  EXPECT_NEAR(obj, best, 1e-6);
}

TEST(FitSvm, RejectsBadInput) {
  const Dataset data = {{make_point({0.0}), 1.0}};
  const auto loss = DistanceBasedLoss::least_squares();
  EXPECT_THROW(fit_svm(data, Kernel::gaussian(1.0, 1), 0.0, loss), std::invalid_argument);
  EXPECT_THROW(fit_svm(data, Kernel::gaussian(1.0, 1), -1.0, loss), std::invalid_argument);
  const Kernel restricted = Kernel::gaussian(1.0, 1).restricted_to(Region::interval(1.0, 2.0, false, 0));
  EXPECT_THROW(fit_svm(data, restricted, 0.1, loss), std::out_of_range);
}

TEST(FitSvm, NonConvergenceCarriesGap) {
  const auto data = noisy_sine_data(40, 1, 5);
  SolverOptions opts;
  opts.max_iter = 1;
  opts.tol_obj = 1e-15;
  try {
    (void)fit_svm(data, Kernel::gaussian(0.5, 1), 1e-4, DistanceBasedLoss::pinball(0.5), opts, 7);
    FAIL() << "expected SolverError";
  } catch (const SolverError& e) {
    EXPECT_GT(e.objective_gap(), 0.0);
    ASSERT_TRUE(e.region().has_value());
    EXPECT_EQ(*e.region(), 7u);
  }
}

TEST(PredictLocal, Examples) {
  const Kernel k = Kernel::gaussian(1.0, 1);
  Eigen::VectorXd a(2);
  a << 1.0, -1.0;
  const LocalModel m({make_point({0.0}), make_point({1.0})}, a, k, 1.0, 0);
  EXPECT_DOUBLE_EQ(predict_local(m, make_point({0.0})), 1.0 - std::exp(-1.0));
  EXPECT_EQ(predict_local(LocalModel::zero(k, 1.0, 0), make_point({5.0})), 0.0);
}

TEST(PredictLocal, OutOfDomainThrows) {
  const Kernel k = Kernel::gaussian(1.0, 1).restricted_to(Region::interval(0.0, 1.0, false, 0));
  const auto m = fit_svm({{make_point({0.5}), 1.0}}, k, 0.1, DistanceBasedLoss::least_squares());
  EXPECT_THROW(predict_local(m, make_point({1.0})), std::out_of_range);
}

TEST(RkhsNorm, Examples) {
  const Kernel k = Kernel::gaussian(1.0, 1);
  Eigen::VectorXd a(2);
  a << 1.0, 1.0;
  const LocalModel m({make_point({0.2}), make_point({0.2})}, a, k, 1.0, 0);
  EXPECT_DOUBLE_EQ(rkhs_norm(m), 2.0);
}

TEST(RkhsNorm, RejectsNonPsdKernel) {
  const Kernel bad = Kernel::custom(
      [](const Point& x, const Point& y) { return x[0] == y[0] ? 1.0 : 2.0; }, 1, 1.0, "bad");
  Eigen::VectorXd a(2);
  a << 1.0, -1.0;
  const LocalModel m({make_point({0.0}), make_point({1.0})}, a, bad, 1.0, 0);
  EXPECT_THROW(rkhs_norm(m), std::domain_error);
}

TEST(EmpiricalRisk, Examples) {
  const Predictor zero = [](const Point&) { return 0.0; };
  const Dataset two = {{make_point({0.0}), 1.0}, {make_point({1.0}), -1.0}};
  EXPECT_EQ(empirical_risk(zero, two, DistanceBasedLoss::least_squares()), 1.0);
  const Predictor exact = [](const Point& x) { return x[0] == 0.0 ? 1.0 : -1.0; };
  EXPECT_EQ(empirical_risk(exact, two, DistanceBasedLoss::pinball(0.3)), 0.0);
  EXPECT_EQ(empirical_risk(zero, {{make_point({0.0}), 2.0}}, DistanceBasedLoss::pinball(0.5)), 1.0);
  EXPECT_THROW(empirical_risk(zero, {}, DistanceBasedLoss::least_squares()), std::invalid_argument);
}

TEST(SolverProperties, LeastSquaresMatchesConjugateGradientOracle) {
  const auto loss = DistanceBasedLoss::least_squares();
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const std::size_t n = 2 + seed % 19;
    const auto data = noisy_sine_data(n, 1 + static_cast<int>(seed % 3), seed);
    const Kernel k = Kernel::gaussian(0.7, data.front().x.size());
    const double lambda = 0.3 / static_cast<double>(seed);
    const auto m = fit_svm(data, k, lambda, loss);
    const Eigen::MatrixXd gram = gram_matrix(inputs_of(data), k);
    const Eigen::VectorXd y = responses_of(data);
    const double fit = regularized_objective(gram, y, m.coefficients(), lambda, loss);
    const double oracle = regularized_objective(gram, y, cg_minimize(gram, y, lambda), lambda, loss);
    EXPECT_LE(std::abs(fit - oracle) / std::max(oracle, 1e-300), 1e-10) << "seed " << seed;
  }
}

TEST(SolverProperties, ObjectiveNormAndSupBounds) {
  std::vector<Point> grid;
  for (int i = 0; i <= 400; ++i) grid.push_back(make_point({-2.0 + 0.01 * i}));
  for (const auto& loss : all_losses()) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto data = noisy_sine_data(30, 1, 100 + seed);
      for (double lambda : {1e-3, 1e-2, 1e-1}) {
        const Kernel k = Kernel::gaussian(0.5, 1);
        const auto m = fit_svm(data, k, lambda, loss);
        const Eigen::MatrixXd gram = gram_matrix(inputs_of(data), k);
        const Eigen::VectorXd y = responses_of(data);
        const double j0 = regularized_objective(gram, y, Eigen::VectorXd::Zero(y.size()), lambda, loss);
        const double jf = regularized_objective(gram, y, m.coefficients(), lambda, loss);
        EXPECT_LE(jf, j0 * (1 + 1e-12)) << loss.name();
        const double norm = rkhs_norm(m);
        EXPECT_LE(norm, std::sqrt(j0 / lambda) * (1 + 1e-8) + 1e-12) << loss.name();
        double sup = 0.0;
        for (const auto& x : grid) sup = std::max(sup, std::abs(m(x)));
        EXPECT_LE(sup, k.sup_norm() * norm * (1 + 1e-8) + 1e-12) << loss.name();
      }
    }
  }
}

TEST(SolverProperties, NormNonIncreasingInLambda) {
  for (const auto& loss : all_losses()) {
    const auto data = noisy_sine_data(40, 1, 77);
    const Kernel k = Kernel::gaussian(0.6, 1);
    double prev = INFINITY;
    for (double lambda : {1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 3e-2, 1e-1, 3e-1, 1.0}) {
      const double norm = rkhs_norm(fit_svm(data, k, lambda, loss));
      EXPECT_LE(norm, prev * (1 + 1e-6) + 1e-9) << loss.name() << " lambda " << lambda;
      prev = norm;
    }
  }
}

TEST(SolverProperties, StationarityForNonsmoothLosses) {
  SolverOptions opts;
  for (const auto& loss : all_losses()) {
    if (loss.kind() == LossKind::least_squares) continue;
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
      const auto data = noisy_sine_data(50, 2, 300 + seed);
      const Kernel k = Kernel::gaussian(0.8, 2);
      const double lambda = 1e-3 * static_cast<double>(seed);
      const auto m = fit_svm(data, k, lambda, loss, opts);
      const Eigen::MatrixXd gram = gram_matrix(inputs_of(data), k);
      const double res = stationarity_residual(gram, responses_of(data), m.coefficients(), lambda, loss,
                                               opts.kink_tol);
      EXPECT_LE(res, opts.tol_grad) << loss.name() << " seed " << seed;
    }
  }
}

TEST(SolverProperties, BitReproducible) {
  for (const auto& loss : all_losses()) {
    const auto data = noisy_sine_data(35, 2, 9);
    const Kernel k = Kernel::gaussian(0.9, 2);
    const auto a = fit_svm(data, k, 0.01, loss);
    const auto b = fit_svm(data, k, 0.01, loss);
    EXPECT_TRUE((a.coefficients().array() == b.coefficients().array()).all()) << loss.name();
  }
}

TEST(SolverProperties, DuplicatePointsAreKept) {
  Dataset data = noisy_sine_data(10, 1, 3);
  const auto copy = data;
  data.insert(data.end(), copy.begin(), copy.end());
  const auto m = fit_svm(data, Kernel::gaussian(0.5, 1), 0.01, DistanceBasedLoss::least_squares());
  EXPECT_EQ(m.support_points().size(), 20u);
}

TEST(SolverOptions, JsonRoundTrip) {
  SolverOptions o;
  o.tol_obj = 1e-7;
  o.max_iter = 123;
  o.jitter = false;
  const auto back = SolverOptions::from_json(o.to_json());
  EXPECT_EQ(back.tol_obj, 1e-7);
  EXPECT_EQ(back.max_iter, 123);
  EXPECT_FALSE(back.jitter);
  EXPECT_EQ(back.tol_grad, 1e-6);
}
