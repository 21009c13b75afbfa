#include "locsvm/distributions.hpp"

#include <boost/math/distributions/normal.hpp>

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace locsvm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

constexpr std::array<double, 5> kGlNodes = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                            0.9061798459386640};
constexpr std::array<double, 5> kGlWeights = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                              0.4786286704993665, 0.2369268850561891};

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_quantile(double tau) {
  static const boost::math::normal_distribution<double> standard;
  return boost::math::quantile(standard, tau);
}

// int_a^b x^{-p/2} dx for 0 <= a <= b.
double power_integral(double a, double b, double p) {
  if (b <= a) return 0.0;
  const double e = 1.0 - p / 2.0;
  if (e > 0.0) return (std::pow(b, e) - std::pow(a, e)) / e;
  if (a == 0.0) return kInf;
  if (e == 0.0) return std::log(b / a);
  return (std::pow(b, e) - std::pow(a, e)) / e;
}

// Simpson's rule on [a, b] with an even number of intervals.
double simpson(const std::function<double(double)>& f, double a, double b, int intervals) {
  if (b <= a) return 0.0;
  const double h = (b - a) / intervals;
  double s = f(a) + f(b);
  for (int k = 1; k < intervals; ++k) s += (k % 2 == 1 ? 4.0 : 2.0) * f(a + k * h);
  return s * h / 3.0;
}

}  // namespace

double gaussian_abs_moment(double mu, double sigma, double p) {
  if (sigma < 0.0) throw std::invalid_argument("gaussian_abs_moment: sigma < 0");
  if (sigma == 0.0) return std::pow(std::abs(mu), p);
  if (p == 2.0) return mu * mu + sigma * sigma;
  if (p == 1.0) {
    const double z = mu / sigma;
    return sigma * std::sqrt(2.0 / std::numbers::pi) * std::exp(-0.5 * z * z) + mu * (1.0 - 2.0 * normal_cdf(-z));
  }
  // Split at the kink z0 = -mu/sigma so each Simpson panel is smooth.
  const double lo = -12.0, hi = 12.0;
  const double z0 = std::clamp(-mu / sigma, lo, hi);
  auto f = [&](double z) { return std::pow(std::abs(mu + sigma * z), p) * normal_pdf(z); };
  return simpson(f, lo, z0, 4000) + simpson(f, z0, hi, 4000);
}

int default_quadrature_panels(int dim) {
  switch (dim) {
    case 1:
      return 900;
    case 2:
      return 60;
    case 3:
      return 16;
    default:
      return 6;
  }
}

double box_quadrature(const std::function<double(const Point&)>& g, const Box& box, int panels_per_axis) {
  const int d = box.dim();
  if (d == 0) throw std::invalid_argument("box_quadrature: zero-dimensional box");
  const int per_axis = panels_per_axis * static_cast<int>(kGlNodes.size());
  std::vector<std::vector<double>> nodes(d), weights(d);
  for (int k = 0; k < d; ++k) {
    const double h = (box.hi[k] - box.lo[k]) / panels_per_axis;
    for (int q = 0; q < panels_per_axis; ++q) {
      const double mid = box.lo[k] + (q + 0.5) * h;
      for (std::size_t r = 0; r < kGlNodes.size(); ++r) {
        nodes[k].push_back(mid + 0.5 * h * kGlNodes[r]);
        weights[k].push_back(0.5 * h * kGlWeights[r]);
      }
    }
  }
  std::vector<int> idx(d, 0);
  Point x(d);
  double total = 0.0;
  while (true) {
    double w = 1.0;
    for (int k = 0; k < d; ++k) {
      x[k] = nodes[k][idx[k]];
      w *= weights[k][idx[k]];
    }
    total += w * g(x);
    int k = d - 1;
    while (k >= 0 && ++idx[k] == per_axis) idx[k--] = 0;
    if (k < 0) break;
  }
  return total;
}

SyntheticDistribution SyntheticDistribution::gaussian_noise(Box support, Target target, double sigma) {
  if (!support.nondegenerate()) throw std::invalid_argument("gaussian_noise: degenerate support box");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("gaussian_noise: sigma must be >= 0");
  return SyntheticDistribution(Kind::gaussian_noise, std::move(support), std::move(target), sigma);
}

SyntheticDistribution SyntheticDistribution::counterexample() {
  return SyntheticDistribution(Kind::counterexample, Box::interval(0.0, 1.0), Target::constant(0.0), 0.0);
}

Point SyntheticDistribution::draw_x(CounterRng& rng) const {
  if (kind_ == Kind::counterexample) return make_point({rng.uniform_open()});
  Point x(dim());
  for (int k = 0; k < dim(); ++k) x[k] = rng.uniform(support_.lo[k], support_.hi[k]);
  return x;
}

double SyntheticDistribution::draw_y(const Point& x, CounterRng& rng) const {
  if (kind_ == Kind::counterexample) return rng.uniform() / std::sqrt(x[0]);
  const double f = target_(x);
  return sigma_ > 0.0 ? f + sigma_ * rng.normal() : f;
}

Sample SyntheticDistribution::draw(CounterRng& rng) const {
  Point x = draw_x(rng);
  const double y = draw_y(x, rng);
  return Sample{std::move(x), y};
}

Dataset SyntheticDistribution::sample(std::size_t n, std::uint64_t seed, Stream stream) const {
  Dataset out;
  out.reserve(n);
  const std::uint64_t key = CounterRng::derive(seed, static_cast<std::uint64_t>(stream));
  for (std::size_t i = 0; i < n; ++i) {
    CounterRng rng = CounterRng(key).substream(i);
    out.push_back(draw(rng));
  }
  return out;
}

std::vector<Point> SyntheticDistribution::sample_inputs(std::size_t n, std::uint64_t seed, Stream stream) const {
  std::vector<Point> out;
  out.reserve(n);
  const std::uint64_t key = CounterRng::derive(seed, static_cast<std::uint64_t>(stream));
  for (std::size_t i = 0; i < n; ++i) {
    CounterRng rng = CounterRng(key).substream(i);
    out.push_back(draw_x(rng));
  }
  return out;
}

std::optional<Box> SyntheticDistribution::integration_box(const Region* region) const {
  if (region == nullptr) return support_;
  const auto bb = region->bounding_box();
  Box b = bb ? support_.intersect(*bb) : support_;
  for (int k = 0; k < b.dim(); ++k) {
    if (!(b.hi[k] > b.lo[k])) return std::nullopt;
  }
  return b;
}

Dataset SyntheticDistribution::sample_in_region(const Region& region, std::size_t n, std::uint64_t seed) const {
  const auto box = integration_box(&region);
  if (!box || marginal_mass(region) <= 0.0) throw std::invalid_argument("sample_in_region: region has zero mass");
  Dataset out;
  out.reserve(n);
  CounterRng rng(CounterRng::derive(seed, static_cast<std::uint64_t>(Stream::evaluation), 0x5245));
  const std::size_t max_tries = 1000 * (n + 1000);
  for (std::size_t tries = 0; out.size() < n; ++tries) {
    if (tries > max_tries) throw std::runtime_error("sample_in_region: acceptance rate too low");
    Point x(dim());
    for (int k = 0; k < dim(); ++k) x[k] = rng.uniform(box->lo[k], box->hi[k]);
    if (kind_ == Kind::counterexample && x[0] <= 0.0) continue;
    if (!region.contains(x)) continue;
    const double y = draw_y(x, rng);
    out.push_back(Sample{std::move(x), y});
  }
  return out;
}

double SyntheticDistribution::bayes_function(const DistanceBasedLoss& loss, const Point& x) const {
  if (kind_ == Kind::counterexample) {
    const double b = 1.0 / std::sqrt(x[0]);
    return loss.kind() == LossKind::pinball ? loss.tau() * b : 0.5 * b;
  }
  const double f = target_(x);
  if (loss.kind() == LossKind::pinball && sigma_ > 0.0) return f + sigma_ * normal_quantile(loss.tau());
  return f;
}

Predictor SyntheticDistribution::bayes_predictor(const DistanceBasedLoss& loss) const {
  return [self = *this, loss](const Point& x) { return self.bayes_function(loss, x); };
}

double SyntheticDistribution::bayes_risk(const DistanceBasedLoss& loss) const {
  if (kind_ == Kind::counterexample) {
    // Y | x uniform on [0, b] with b = x^{-1/2}, and E[b] = 2, E[b^2] = inf.
    switch (loss.kind()) {
      case LossKind::least_squares:
        return kInf;
      case LossKind::pinball:
        return loss.tau() * (1.0 - loss.tau());
      case LossKind::epsilon_insensitive: {
        const double e = loss.epsilon();
        return e <= 0.5 ? 0.5 - e + 2.0 * e * e / 3.0 : 1.0 / (12.0 * e);
      }
    }
  }
  const double s = sigma_;
  if (s == 0.0) return 0.0;
  switch (loss.kind()) {
    case LossKind::least_squares:
      return s * s;
    case LossKind::pinball:
      return s * normal_pdf(normal_quantile(loss.tau()));
    case LossKind::epsilon_insensitive: {
      const double e = loss.epsilon();
      return 2.0 * (s * normal_pdf(e / s) - e * (1.0 - normal_cdf(e / s)));
    }
  }
  throw std::logic_error("bayes_risk: unknown loss");
}

double SyntheticDistribution::conditional_abs_moment(const Point& x, double p) const {
  if (kind_ == Kind::counterexample) return std::pow(x[0], -p / 2.0) / (p + 1.0);
  return gaussian_abs_moment(target_(x), sigma_, p);
}

double SyntheticDistribution::conditional_moment_sup(double p) const {
  if (kind_ == Kind::counterexample) return kInf;
  return std::pow(gaussian_abs_moment(target_.sup_bound(support_), sigma_, p), 1.0 / p);
}

double SyntheticDistribution::integrate(const std::function<double(const Point&)>& g, const Region* region) const {
  const auto box = integration_box(region);
  if (!box) return 0.0;
  const double density = 1.0 / support_.volume();
  auto integrand = [&](const Point& x) {
    if (region != nullptr && !region->contains(x)) return 0.0;
    return g(x);
  };
  return density * box_quadrature(integrand, *box, default_quadrature_panels(dim()));
}

double SyntheticDistribution::marginal_mass(const Region& region) const {
  const auto box = integration_box(&region);
  if (!box) return 0.0;
  // Every region shape is an interval in one dimension.
  if (dim() == 1) return box->volume() / support_.volume();
  if (std::holds_alternative<BoxShape>(region.shape())) return box->volume() / support_.volume();
  return integrate([](const Point&) { return 1.0; }, &region);
}

double SyntheticDistribution::moment_integral(double p, const Region* region) const {
  if (kind_ == Kind::counterexample) {
    const auto box = integration_box(region);
    if (!box) return 0.0;
    return power_integral(box->lo[0], box->hi[0], p) / (p + 1.0);
  }
  return integrate([&](const Point& x) { return conditional_abs_moment(x, p); }, region);
}

nlohmann::json SyntheticDistribution::to_json() const {
  if (kind_ == Kind::counterexample) return {{"type", "counterexample"}};
  return {{"type", "gaussian_noise"}, {"support", box_to_json(support_)}, {"target", target_.to_json()},
          {"sigma", sigma_}};
}

SyntheticDistribution SyntheticDistribution::from_json(const nlohmann::json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "counterexample") return counterexample();
  if (type == "gaussian_noise") {
    return gaussian_noise(box_from_json(j.at("support")), Target::from_json(j.at("target")), j.at("sigma").get<double>());
  }
  throw std::invalid_argument("unknown distribution type '" + type + "'");
}

}  // namespace locsvm
