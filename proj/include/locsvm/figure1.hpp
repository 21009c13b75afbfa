#pragma once

#include "locsvm/experiments.hpp"
#include "locsvm/targets.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <vector>

namespace locsvm {

/// Default pieces on [0, 9]: a slow sine on [0, 3), a jump of height 2 at
/// x = 3, a ramp with a moderate oscillation on [3, 6) that meets the fast
/// oscillation on [6, 9] continuously.
std::vector<SinePiece> figure1_default_pieces();
Target figure1_default_target();
/// Default target at x; throws outside [0, 9].
double figure1_target(double x);

struct Figure1Config {
  std::vector<SinePiece> pieces = figure1_default_pieces();
  double sigma = 0.3;
  std::size_t n = 600;
  /// Trailing part of the n samples held out to choose (gamma, lambda).
  double validation_fraction = 1.0 / 3.0;
  std::size_t n_test = 10000;
  std::vector<double> gammas = {0.1, 0.2, 0.4, 0.8, 1.6};
  std::vector<double> lambdas = {1e-4, 1e-3, 1e-2, 1e-1};
  /// Interior partition boundaries.
  std::vector<double> boundaries = {3.0, 6.0};
  std::uint64_t seed = 1;
  std::size_t curve_points = 901;

  [[nodiscard]] Target target() const { return Target::piecewise(pieces); }
  [[nodiscard]] double lo() const { return pieces.front().start; }
  [[nodiscard]] double hi() const { return pieces.back().end; }
  [[nodiscard]] nlohmann::json to_json() const;
  static Figure1Config from_json(const nlohmann::json& j);
};

struct Figure1Record {
  std::uint64_t seed = 0;
  /// Mean squared distance to the target on fresh test inputs.
  double mse_global = 0.0;
  double mse_localized = 0.0;
  /// Mean squared error against fresh noisy test labels.
  double noisy_mse_global = 0.0;
  double noisy_mse_localized = 0.0;
  double global_gamma = 0.0;
  double global_lambda = 0.0;
  std::vector<double> region_gammas;
  std::vector<double> region_lambdas;
  [[nodiscard]] bool operator==(const Figure1Record&) const = default;
  [[nodiscard]] nlohmann::json to_json() const;
};

struct Figure1Curves {
  std::vector<double> x, target, global, localized;
};

/// Global SVM vs. localized SVM on the interval partition at the
/// boundaries, both least squares with Gaussian kernels tuned on the same
/// grid, then refit on all n samples.
/// Every fitted model, tuning fits included, is added to `audit` when given.
Figure1Record figure1_experiment(const Figure1Config& config, Figure1Curves* curves = nullptr,
                                 NormAudit* audit = nullptr);

}  // namespace locsvm
