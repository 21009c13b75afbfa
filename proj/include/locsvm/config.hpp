#pragma once

#include "locsvm/distributions.hpp"
#include "locsvm/experiments.hpp"
#include "locsvm/localized.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace locsvm {

nlohmann::json load_json_file(const std::filesystem::path& path);

/// CSV rows "x_1,...,x_d,y". A first row that does not parse as numbers is
/// taken as a header.
Dataset read_dataset_csv(std::istream& in);
/// CSV rows "x_1,...,x_d"; same header rule.
std::vector<Point> read_points_csv(std::istream& in);

/// Everything needed for one localized fit, resolved from a JSON config.
struct FitSetup {
  Dataset data;
  std::optional<SyntheticDistribution> distribution;
  std::shared_ptr<const Regionalization> regionalization;
  WeightKind weight_kind = WeightKind::indicator;
  Bump bump = Bump::cone;
  std::vector<double> gammas;  // per region
  std::vector<double> lambdas;  // per region
  std::optional<LambdaSchedule> schedule;
  DistanceBasedLoss loss = DistanceBasedLoss::least_squares();
  SolverOptions solver;
  std::size_t threads = 1;
  std::uint64_t seed = 0;

  [[nodiscard]] WeightScheme weights() const;
  [[nodiscard]] KernelAssignment kernels() const;
};

/// Relative paths in the config resolve against `base_dir`.
FitSetup fit_setup_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir,
                             std::optional<std::uint64_t> seed_override = std::nullopt);
LocalizedModel run_fit(const FitSetup& setup);

/// Regionalization, weight and schedule reports for a fit or sweep config.
struct ValidationResult {
  nlohmann::json report;
  std::string table;
  bool ok = false;
};
ValidationResult validate_config(const nlohmann::json& j, const std::filesystem::path& base_dir,
                                 std::optional<std::uint64_t> seed_override = std::nullopt);

/// Applies a --seed override to a sweep config: the seed list becomes {seed}.
SweepConfig sweep_config_from_json(const nlohmann::json& j, std::optional<std::uint64_t> seed_override = std::nullopt);

}  // namespace locsvm
