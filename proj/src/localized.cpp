#include "locsvm/localized.hpp"

#include "locsvm/parallel.hpp"

#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace locsvm {

KernelAssignment::KernelAssignment(std::vector<KernelFamily> families, std::size_t regions)
    : families_(std::move(families)), per_region_(regions) {
  if (families_.empty()) throw std::invalid_argument("KernelAssignment: no kernel families");
}

KernelAssignment KernelAssignment::uniform(const Kernel& kernel, std::size_t regions) {
  KernelAssignment a({KernelFamily(kernel, {{kernel.name(), kernel, 1.0}})}, regions);
  for (std::size_t i = 0; i < regions; ++i) a.set(i, 0, 0);
  return a;
}

void KernelAssignment::set(std::size_t region, std::size_t family, std::size_t member) {
  if (region >= per_region_.size()) throw std::out_of_range("KernelAssignment: region index out of range");
  if (family >= families_.size()) throw std::out_of_range("KernelAssignment: kernel is not from a declared family");
  const auto& fam = families_[family];
  if (member >= fam.size()) throw std::out_of_range("KernelAssignment: member index out of range");
  const auto& m = fam.member(member);
  per_region_[region] = RegionKernel{family, m.id, m.kernel, m.beta, fam.reference()};
}

void KernelAssignment::set_bandwidth(std::size_t region, std::size_t family, double gamma) {
  if (region >= per_region_.size()) throw std::out_of_range("KernelAssignment: region index out of range");
  if (family >= families_.size()) throw std::out_of_range("KernelAssignment: kernel is not from a declared family");
  const auto& fam = families_[family];
  const auto m = fam.member_for_bandwidth(gamma);
  per_region_[region] = RegionKernel{family, m.id, m.kernel, m.beta, fam.reference()};
}

const RegionKernel& KernelAssignment::operator[](std::size_t region) const {
  const auto& rk = per_region_.at(region);
  if (!rk) throw std::logic_error("KernelAssignment: region has no kernel assigned");
  return *rk;
}

bool KernelAssignment::complete() const {
  for (const auto& rk : per_region_) {
    if (!rk) return false;
  }
  return true;
}

LocalizedModel::LocalizedModel(std::shared_ptr<const Regionalization> regionalization, WeightScheme weights,
                               std::vector<LocalModel> local_models, std::vector<double> betas, DistanceBasedLoss loss)
    : regionalization_(std::move(regionalization)),
      weights_(std::move(weights)),
      local_models_(std::move(local_models)),
      betas_(std::move(betas)),
      loss_(loss) {
  if (!regionalization_) throw std::invalid_argument("LocalizedModel: null regionalization");
  if (local_models_.size() != regionalization_->size() || betas_.size() != local_models_.size()) {
    throw std::invalid_argument("LocalizedModel: need exactly one local model and beta per region");
  }
  if (weights_.regionalization_ptr() != regionalization_) {
    throw std::invalid_argument("LocalizedModel: weight scheme refers to a different regionalization");
  }
}

double LocalizedModel::operator()(const Point& x) const {
  double s = 0.0;
  for (const auto& [i, w] : weights_.nonzero(x)) s += w * local_models_[i](x);
  return s;
}

double predict(const LocalizedModel& model, const Point& x) { return model(x); }

std::vector<double> LocalizedModel::lambdas() const {
  std::vector<double> out;
  out.reserve(local_models_.size());
  for (const auto& m : local_models_) out.push_back(m.lambda());
  return out;
}

nlohmann::json LocalizedModel::to_json() const {
  nlohmann::json j;
  j["format"] = "locsvm-model";
  j["version"] = kFormatVersion;
  j["loss"] = loss_.to_json();
  j["regionalization"] = regionalization_->to_json();
  j["weights"] = weights_.to_json();
  j["local_models"] = nlohmann::json::array();
  for (std::size_t i = 0; i < local_models_.size(); ++i) {
    const auto& m = local_models_[i];
    nlohmann::json lm;
    lm["region"] = i;
    lm["zero"] = m.is_zero_model();
    lm["lambda"] = m.lambda();
    lm["beta"] = betas_[i];
    lm["kernel"] = m.kernel().to_json();
    lm["support_points"] = nlohmann::json::array();
    for (const auto& p : m.support_points()) lm["support_points"].push_back(point_to_json(p));
    lm["coefficients"] = std::vector<double>(m.coefficients().data(), m.coefficients().data() + m.coefficients().size());
    j["local_models"].push_back(std::move(lm));
  }
  return j;
}

LocalizedModel LocalizedModel::from_json(const nlohmann::json& j) {
  if (j.value("format", std::string()) != "locsvm-model") throw std::invalid_argument("not a locsvm model document");
  const int version = j.at("version").get<int>();
  if (version != kFormatVersion) {
    std::ostringstream msg;
    msg << "unsupported model format version " << version;
    throw std::invalid_argument(msg.str());
  }
  auto r = std::make_shared<const Regionalization>(Regionalization::from_json(j.at("regionalization")));
  auto weights = WeightScheme::from_json(j.at("weights"), r);
  std::vector<LocalModel> models;
  std::vector<double> betas;
  for (const auto& lm : j.at("local_models")) {
    const auto i = lm.at("region").get<std::size_t>();
    if (i != models.size() || i >= r->size()) throw std::invalid_argument("model JSON: local models out of order");
    const Kernel kernel = Kernel::from_json(lm.at("kernel")).restricted_to(r->region(i));
    std::vector<Point> pts;
    for (const auto& p : lm.at("support_points")) pts.push_back(point_from_json(p));
    const auto coef = lm.at("coefficients").get<std::vector<double>>();
    Eigen::VectorXd alpha = Eigen::Map<const Eigen::VectorXd>(coef.data(), static_cast<Eigen::Index>(coef.size()));
    models.emplace_back(std::move(pts), std::move(alpha), kernel, lm.at("lambda").get<double>(), i);
    betas.push_back(lm.value("beta", 1.0));
  }
  return LocalizedModel(std::move(r), std::move(weights), std::move(models), std::move(betas),
                        DistanceBasedLoss::from_json(j.at("loss")));
}

LocalizedModel fit_localized(const Dataset& data, std::shared_ptr<const Regionalization> r,
                             std::span<const double> lambdas, const KernelAssignment& kernels,
                             const DistanceBasedLoss& loss, const WeightScheme& weights, const SolverOptions& opts,
                             std::size_t threads) {
  if (!r) throw std::invalid_argument("fit_localized: null regionalization");
  const std::size_t m = r->size();
  if (lambdas.size() != m || kernels.size() != m) {
    throw std::invalid_argument("fit_localized: need one lambda and one kernel per region");
  }
  for (double l : lambdas) {
    if (!(l > 0.0)) throw std::invalid_argument("fit_localized: lambdas must be positive");
  }
  if (weights.regionalization_ptr() != r) {
    throw std::invalid_argument("fit_localized: weight scheme refers to a different regionalization");
  }
  const Assignment parts = assign(data, *r);

  std::vector<std::optional<LocalModel>> fitted(m);
  parallel_for(m, threads, [&](std::size_t i) {
    const Kernel kernel = kernels[i].kernel.restricted_to(r->region(i));
    try {
      fitted[i] = fit_svm(parts.per_region_data[i], kernel, lambdas[i], loss, opts, i);
    } catch (const SolverError& e) {
      std::ostringstream msg;
      msg << "region " << i << ": " << e.what();
      throw SolverError(msg.str(), e.objective_gap(), i);
    }
  });
  std::vector<LocalModel> models;
  std::vector<double> betas;
  models.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    models.push_back(std::move(*fitted[i]));
    betas.push_back(kernels[i].beta);
  }
  return LocalizedModel(std::move(r), weights, std::move(models), std::move(betas), loss);
}

LocalizedModel fit_global(const Dataset& data, const Kernel& kernel, double lambda, const DistanceBasedLoss& loss,
                          const SolverOptions& opts) {
  auto r = std::make_shared<const Regionalization>(std::vector<Region>{Region::whole(kernel.dim(), 0)}, 1, true);
  const double lambdas[] = {lambda};
  return fit_localized(data, r, lambdas, KernelAssignment::uniform(kernel, 1), loss, indicator_weights(r), opts);
}

}  // namespace locsvm
