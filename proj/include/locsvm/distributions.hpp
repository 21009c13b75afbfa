#pragma once

#include "locsvm/losses.hpp"
#include "locsvm/region.hpp"
#include "locsvm/rng.hpp"
#include "locsvm/targets.hpp"
#include "locsvm/types.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

namespace locsvm {

/// Synthetic joint distribution with a known Bayes function.
///
/// gaussian_noise: X ~ U(support), Y = f(X) + sigma * N(0, 1).
/// counterexample: X ~ U(0, 1), Y | X = x ~ U(0, x^{-1/2}).
class SyntheticDistribution {
 public:
  enum class Kind { gaussian_noise, counterexample };

  /// sigma >= 0; sigma = 0 gives a noiseless (point-mass) conditional.
  static SyntheticDistribution gaussian_noise(Box support, Target target, double sigma);
  static SyntheticDistribution counterexample();

  /// Sample i is drawn from its own counter stream keyed by (seed, stream, i),
  /// so the first k samples do not depend on n.
  [[nodiscard]] Dataset sample(std::size_t n, std::uint64_t seed, Stream stream = Stream::training) const;
  [[nodiscard]] std::vector<Point> sample_inputs(std::size_t n, std::uint64_t seed, Stream stream) const;
  [[nodiscard]] Sample draw(CounterRng& rng) const;
  [[nodiscard]] Point draw_x(CounterRng& rng) const;
  [[nodiscard]] double draw_y(const Point& x, CounterRng& rng) const;

  /// Samples from P restricted to `region` and renormalized. Requires
  /// positive marginal mass; uses rejection from the region's bounding box.
  [[nodiscard]] Dataset sample_in_region(const Region& region, std::size_t n, std::uint64_t seed) const;

  /// Bayes function of the loss: conditional mean, tau-quantile, or the
  /// center of the (symmetric) conditional distribution.
  [[nodiscard]] double bayes_function(const DistanceBasedLoss& loss, const Point& x) const;
  [[nodiscard]] Predictor bayes_predictor(const DistanceBasedLoss& loss) const;
  /// Analytic Bayes risk; +inf when the risk diverges.
  [[nodiscard]] double bayes_risk(const DistanceBasedLoss& loss) const;

  /// E[|Y|^p | X = x].
  [[nodiscard]] double conditional_abs_moment(const Point& x, double p) const;
  /// Upper bound on sup_x (E[|Y|^p | X = x])^{1/p}; +inf when unbounded.
  [[nodiscard]] double conditional_moment_sup(double p) const;
  /// Integral of E[|Y|^p | X] over `region` (all of the support when null)
  /// against P^X, not renormalized. +inf when divergent.
  [[nodiscard]] double moment_integral(double p, const Region* region = nullptr) const;
  [[nodiscard]] double marginal_mass(const Region& region) const;
  /// Integral of g against P^X over `region` (support when null).
  [[nodiscard]] double integrate(const std::function<double(const Point&)>& g, const Region* region = nullptr) const;

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] const Box& support() const { return support_; }
  [[nodiscard]] int dim() const { return support_.dim(); }
  [[nodiscard]] double sigma() const { return sigma_; }
  [[nodiscard]] const Target& target() const { return target_; }

  [[nodiscard]] nlohmann::json to_json() const;
  static SyntheticDistribution from_json(const nlohmann::json& j);

 private:
  SyntheticDistribution(Kind kind, Box support, Target target, double sigma)
      : kind_(kind), support_(std::move(support)), target_(std::move(target)), sigma_(sigma) {}
  /// Support box intersected with the region's bounding box.
  [[nodiscard]] std::optional<Box> integration_box(const Region* region) const;

  Kind kind_;
  Box support_;
  Target target_;
  double sigma_;
};

/// E|mu + sigma Z|^p for Z ~ N(0, 1).
double gaussian_abs_moment(double mu, double sigma, double p);

/// Composite 5-point Gauss-Legendre rule over a box.
double box_quadrature(const std::function<double(const Point&)>& g, const Box& box, int panels_per_axis);
int default_quadrature_panels(int dim);

}  // namespace locsvm
