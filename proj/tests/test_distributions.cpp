#include "locsvm/distributions.hpp"
#include "locsvm/rng.hpp"

#include <gtest/gtest.h>

#include <boost/math/distributions/normal.hpp>

#include <cmath>

using namespace locsvm;

namespace {

SyntheticDistribution sine_noise(double sigma) {
  return SyntheticDistribution::gaussian_noise(Box::interval(0, 2 * M_PI), Target::sine(1.0, 2.0), sigma);
}

double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace

TEST(Sample, EmptyAndDeterministic) {
  const auto d = sine_noise(0.3);
  EXPECT_TRUE(d.sample(0, 1).empty());
  const auto a = d.sample(500, 42), b = d.sample(500, 42), c = d.sample(500, 43);
  ASSERT_EQ(a.size(), 500u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].x, b[i].x);
    EXPECT_EQ(a[i].y, b[i].y);
  }
  EXPECT_NE(a[0].y, c[0].y);
}

TEST(Sample, PrefixesAreNested) {
  const auto d = sine_noise(0.3);
  const auto small = d.sample(100, 7), large = d.sample(1000, 7);
  for (std::size_t i = 0; i < small.size(); ++i) EXPECT_EQ(small[i].y, large[i].y);
}

TEST(Sample, StreamsAreDisjoint) {
  const auto d = sine_noise(0.3);
  const auto a = d.sample(50, 7, Stream::training), b = d.sample(50, 7, Stream::evaluation);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NE(a[i].x, b[i].x);
}

TEST(Sample, InputsStayInSupport) {
  const auto d = SyntheticDistribution::gaussian_noise(Box{make_point({0, -1}), make_point({2, 1})},
                                                       Target::linear(make_point({1, 1}), 0.0), 0.1);
  for (const auto& s : d.sample(2000, 3)) EXPECT_TRUE(d.support().contains(s.x));
  for (const auto& s : SyntheticDistribution::counterexample().sample(2000, 3)) {
    EXPECT_GT(s.x[0], 0.0);
    EXPECT_LT(s.x[0], 1.0);
    EXPECT_GE(s.y, 0.0);
    EXPECT_LE(s.y, 1.0 / std::sqrt(s.x[0]));
  }
}

TEST(Sample, CounterexampleMeanIsOne) {
  const auto data = SyntheticDistribution::counterexample().sample(1000000, 11);
  double s = 0.0;
  for (const auto& d : data) s += d.y;
  const double mean = s / data.size();
  double ss = 0.0;
  for (const auto& d : data) ss += (d.y - mean) * (d.y - mean);
  const double se = std::sqrt(ss / (data.size() - 1) / data.size());
  EXPECT_NEAR(mean, 1.0, 3 * se);
}

TEST(Sample, GaussianNoiseResidualMoments) {
  const auto d = sine_noise(0.3);
  const auto data = d.sample(200000, 2);
  double m = 0.0, v = 0.0;
  for (const auto& s : data) m += s.y - std::sin(2 * s.x[0]);
  m /= data.size();
  for (const auto& s : data) v += std::pow(s.y - std::sin(2 * s.x[0]) - m, 2);
  v /= data.size();
  EXPECT_NEAR(m, 0.0, 4 * 0.3 / std::sqrt(200000.0));
  EXPECT_NEAR(v, 0.09, 0.002);
}

TEST(SampleInRegion, RespectsRegion) {
  const auto d = SyntheticDistribution::counterexample();
  const Region r = Region::interval(0.1, 0.2, false, 0);
  const auto data = d.sample_in_region(r, 1000, 5);
  ASSERT_EQ(data.size(), 1000u);
  for (const auto& s : data) EXPECT_TRUE(r.contains(s.x));
}

TEST(BayesFunction, MatchesLoss) {
  const auto d = sine_noise(0.5);
  const Point x = make_point({1.1});
  EXPECT_EQ(d.bayes_function(DistanceBasedLoss::least_squares(), x), std::sin(2.2));
  EXPECT_EQ(d.bayes_function(DistanceBasedLoss::epsilon_insensitive(0.2), x), std::sin(2.2));
  const boost::math::normal_distribution<> z;
  EXPECT_NEAR(d.bayes_function(DistanceBasedLoss::pinball(0.7), x),
              std::sin(2.2) + 0.5 * boost::math::quantile(z, 0.7), 1e-14);
  const auto c = SyntheticDistribution::counterexample();
  EXPECT_DOUBLE_EQ(c.bayes_function(DistanceBasedLoss::pinball(0.3), make_point({0.25})), 0.6);
  EXPECT_DOUBLE_EQ(c.bayes_function(DistanceBasedLoss::epsilon_insensitive(0.1), make_point({0.25})), 1.0);
}

TEST(BayesFunction, PinballQuantileHasCoverageTau) {
  const auto d = sine_noise(0.4);
  const auto loss = DistanceBasedLoss::pinball(0.8);
  const auto data = d.sample(100000, 9);
  std::size_t below = 0;
  for (const auto& s : data) below += s.y <= d.bayes_function(loss, s.x);
  const double frac = static_cast<double>(below) / data.size();
  EXPECT_NEAR(frac, 0.8, 4 * std::sqrt(0.8 * 0.2 / data.size()));
}

TEST(BayesRisk, GaussianNoiseMatchesQuadrature) {
  const double sigma = 0.3;
  const auto d = sine_noise(sigma);
  const auto phi = [&](double z) { return std::exp(-0.5 * z * z) / std::sqrt(2 * M_PI); };
  EXPECT_DOUBLE_EQ(d.bayes_risk(DistanceBasedLoss::least_squares()), sigma * sigma);
  for (double tau : {0.1, 0.5, 0.7}) {
    const auto loss = DistanceBasedLoss::pinball(tau);
    const double q = sigma * boost::math::quantile(boost::math::normal_distribution<>(), tau);
    const double oracle = simpson([&](double z) { return loss.psi(sigma * z - q) * phi(z); }, -12, 12, 200000);
    EXPECT_NEAR(d.bayes_risk(loss), oracle, 1e-9) << tau;
  }
  for (double eps : {0.0, 0.1, 0.5}) {
    const auto loss = DistanceBasedLoss::epsilon_insensitive(eps);
    const double oracle = simpson([&](double z) { return loss.psi(sigma * z) * phi(z); }, -12, 12, 200000);
    EXPECT_NEAR(d.bayes_risk(loss), oracle, 1e-9) << eps;
  }
}

TEST(BayesRisk, CounterexampleMatchesQuadrature) {
  const auto c = SyntheticDistribution::counterexample();
  EXPECT_TRUE(std::isinf(c.bayes_risk(DistanceBasedLoss::least_squares())));
  // With x = t^2 the conditional risks in b = 1/t become smooth in t.
  for (double tau : {0.2, 0.5, 0.9}) {
    const double oracle = simpson([&](double t) { return t == 0 ? tau * (1 - tau) : 2 * t * (tau * (1 - tau) / (2 * t)); },
                                  0, 1, 2000);
    EXPECT_NEAR(c.bayes_risk(DistanceBasedLoss::pinball(tau)), oracle, 1e-12);
  }
  for (double eps : {0.0, 0.2, 0.5, 0.8, 2.0}) {
    const auto risk_given_b = [&](double b) { return b > 2 * eps ? (b / 2 - eps) * (b / 2 - eps) / b : 0.0; };
    const double kink = eps > 0.5 ? 1 / (2 * eps) : 1.0;
    const auto integrand = [&](double t) { return t == 0 ? 0.5 : 2 * t * risk_given_b(1 / t); };
    const double oracle = simpson(integrand, 0, kink, 20000);
    EXPECT_NEAR(c.bayes_risk(DistanceBasedLoss::epsilon_insensitive(eps)), oracle, 1e-10) << eps;
  }
}

TEST(BayesRisk, NoiselessIsZero) {
  const auto d = sine_noise(0.0);
  EXPECT_EQ(d.bayes_risk(DistanceBasedLoss::pinball(0.3)), 0.0);
  EXPECT_EQ(d.bayes_risk(DistanceBasedLoss::least_squares()), 0.0);
}

TEST(Moments, GaussianAbsMomentClosedFormsAgreeWithQuadrature) {
  const auto phi = [](double z) { return std::exp(-0.5 * z * z) / std::sqrt(2 * M_PI); };
  for (double mu : {0.0, 0.4, -1.3}) {
    for (double p : {1.0, 1.5, 2.0, 3.0}) {
      const double oracle =
          simpson([&](double z) { return std::pow(std::abs(mu + 0.7 * z), p) * phi(z); }, -14, 14, 400000);
      EXPECT_NEAR(gaussian_abs_moment(mu, 0.7, p), oracle, 1e-7) << mu << " " << p;
    }
  }
  EXPECT_EQ(gaussian_abs_moment(-2.0, 0.0, 3.0), 8.0);
}

TEST(Moments, MarginalMassOfShapes) {
  const auto d = SyntheticDistribution::gaussian_noise(Box{make_point({0, 0}), make_point({1, 1})},
                                                       Target::constant(0.0), 1.0);
  EXPECT_NEAR(d.marginal_mass(Region::ball(make_point({0.5, 0.5}), 0.25, std::nullopt, 0)), M_PI / 16, 2e-3);
  EXPECT_DOUBLE_EQ(
      d.marginal_mass(Region::box(Box{make_point({0, 0}), make_point({0.5, 0.25})}, {false, false}, 0)), 0.125);
  EXPECT_EQ(SyntheticDistribution::counterexample().marginal_mass(Region::interval(0.5, 2.0, false, 0)), 0.5);
}

TEST(Distribution, JsonRoundTrip) {
  const auto d = sine_noise(0.3);
  const auto back = SyntheticDistribution::from_json(d.to_json());
  EXPECT_EQ(back.sigma(), 0.3);
  EXPECT_EQ(back.sample(10, 1)[3].y, d.sample(10, 1)[3].y);
  const auto c = SyntheticDistribution::from_json(nlohmann::json{{"type", "counterexample"}});
  EXPECT_EQ(c.kind(), SyntheticDistribution::Kind::counterexample);
}

TEST(Targets, PiecewiseValidation) {
  EXPECT_THROW(Target::piecewise({}), std::invalid_argument);
  SinePiece a{0, 1, 0, 0, 0, 0, 0}, b{1.5, 2, 0, 0, 0, 0, 0};
  EXPECT_THROW(Target::piecewise({a, b}), std::invalid_argument);
  SinePiece c{1, 2, 5, 0, 0, 0, 0};
  const auto t = Target::piecewise({a, c});
  EXPECT_EQ(t(make_point({0.999})), 0.0);
  EXPECT_EQ(t(make_point({1.0})), 5.0);
  EXPECT_EQ(t(make_point({2.0})), 5.0);
  EXPECT_THROW((void)t(make_point({2.01})), std::out_of_range);
  EXPECT_THROW((void)t(make_point({-0.01})), std::out_of_range);
}

TEST(Targets, SupBoundAndJson) {
  const auto s = Target::sine(1.5, 2.0);
  EXPECT_GE(s.sup_bound(Box::interval(0, 7)), 1.5);
  const auto l = Target::linear(make_point({2.0, -1.0}), 0.5);
  EXPECT_EQ(l(make_point({1.0, 1.0})), 1.5);
  EXPECT_GE(l.sup_bound(Box{make_point({-1, -1}), make_point({1, 1})}), 3.5);
  const auto back = Target::from_json(l.to_json());
  EXPECT_EQ(back(make_point({0.3, 2.0})), l(make_point({0.3, 2.0})));
}
