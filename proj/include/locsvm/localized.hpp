#pragma once

#include "locsvm/kernels.hpp"
#include "locsvm/losses.hpp"
#include "locsvm/regionalize.hpp"
#include "locsvm/solver.hpp"
#include "locsvm/weights.hpp"

#include <json.hpp>

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace locsvm {

/// Kernel chosen for one region: a member of one of the declared families,
/// together with its beta and the family's reference kernel.
struct RegionKernel {
  std::size_t family = 0;
  std::string member_id;
  Kernel kernel;
  double beta = 1.0;
  Kernel reference;
};

class KernelAssignment {
 public:
  KernelAssignment(std::vector<KernelFamily> families, std::size_t regions);

  /// Same kernel in every region, as a one-member family with beta = 1.
  static KernelAssignment uniform(const Kernel& kernel, std::size_t regions);

  void set(std::size_t region, std::size_t family, std::size_t member);
  /// For interval families: materializes the member with this bandwidth.
  void set_bandwidth(std::size_t region, std::size_t family, double gamma);

  [[nodiscard]] std::size_t size() const { return per_region_.size(); }
  [[nodiscard]] const RegionKernel& operator[](std::size_t region) const;
  [[nodiscard]] const std::vector<KernelFamily>& families() const { return families_; }
  [[nodiscard]] bool complete() const;

 private:
  std::vector<KernelFamily> families_;
  std::vector<std::optional<RegionKernel>> per_region_;
};

/// Weighted combination of zero-extended local SVMs. Immutable.
class LocalizedModel {
 public:
  LocalizedModel(std::shared_ptr<const Regionalization> regionalization, WeightScheme weights,
                 std::vector<LocalModel> local_models, std::vector<double> betas, DistanceBasedLoss loss);

  /// sum_i w_i(x) g_i(x), evaluating only regions with w_i(x) > 0.
  [[nodiscard]] double operator()(const Point& x) const;

  [[nodiscard]] const Regionalization& regionalization() const { return *regionalization_; }
  [[nodiscard]] const WeightScheme& weights() const { return weights_; }
  [[nodiscard]] const std::vector<LocalModel>& local_models() const { return local_models_; }
  [[nodiscard]] const LocalModel& local_model(std::size_t i) const { return local_models_.at(i); }
  [[nodiscard]] std::vector<double> lambdas() const;
  [[nodiscard]] const std::vector<double>& betas() const { return betas_; }
  [[nodiscard]] const DistanceBasedLoss& loss() const { return loss_; }

  static constexpr int kFormatVersion = 1;
  [[nodiscard]] nlohmann::json to_json() const;
  static LocalizedModel from_json(const nlohmann::json& j);

 private:
  std::shared_ptr<const Regionalization> regionalization_;
  WeightScheme weights_;
  std::vector<LocalModel> local_models_;
  std::vector<double> betas_;
  DistanceBasedLoss loss_;
};

/// One fit_svm per region on D_i with the region's restricted kernel and
/// lambda; empty regions get zero models. Region fits may run on `threads`
/// workers; the result does not depend on scheduling.
LocalizedModel fit_localized(const Dataset& data, std::shared_ptr<const Regionalization> r,
                             std::span<const double> lambdas, const KernelAssignment& kernels,
                             const DistanceBasedLoss& loss, const WeightScheme& weights,
                             const SolverOptions& opts = {}, std::size_t threads = 1);

/// Single-region wrapper around fit_svm on all of R^d.
LocalizedModel fit_global(const Dataset& data, const Kernel& kernel, double lambda, const DistanceBasedLoss& loss,
                          const SolverOptions& opts = {});

double predict(const LocalizedModel& model, const Point& x);

}  // namespace locsvm
