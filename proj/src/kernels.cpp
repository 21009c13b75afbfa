#include "locsvm/kernels.hpp"

#include "locsvm/rng.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace locsvm {

double gaussian_eval(const Point& x, const Point& xp, double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("gaussian_eval: gamma must be positive");
  if (x.size() != xp.size()) throw std::invalid_argument("gaussian_eval: dimension mismatch");
  return std::exp(-(x - xp).squaredNorm() / (gamma * gamma));
}

Kernel Kernel::gaussian(double gamma, int dim) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("Kernel::gaussian: gamma must be positive");
  if (dim <= 0) throw std::invalid_argument("Kernel::gaussian: dim must be positive");
  return Kernel(GaussianForm{gamma}, dim);
}

Kernel Kernel::linear(int dim) {
  if (dim <= 0) throw std::invalid_argument("Kernel::linear: dim must be positive");
  return Kernel(LinearForm{}, dim);
}

Kernel Kernel::custom(std::function<double(const Point&, const Point&)> fn, int dim, double sup_norm_bound,
                      std::string name) {
  if (!fn) throw std::invalid_argument("Kernel::custom: empty function");
  if (dim <= 0) throw std::invalid_argument("Kernel::custom: dim must be positive");
  if (!(sup_norm_bound >= 0.0) || !std::isfinite(sup_norm_bound)) {
    throw std::invalid_argument("Kernel::custom: sup-norm bound must be finite and nonnegative");
  }
  CounterRng rng(CounterRng::derive(0, static_cast<std::uint64_t>(Stream::kernel_check)));
  for (int s = 0; s < 256; ++s) {
    Point x(dim);
    for (int k = 0; k < dim; ++k) x[k] = 3.0 * rng.normal();
    const double kxx = fn(x, x);
    if (!std::isfinite(kxx) || kxx < -1e-12 || std::sqrt(std::max(kxx, 0.0)) > sup_norm_bound + 1e-12) {
      std::ostringstream msg;
      msg << "Kernel::custom: declared sup-norm bound " << sup_norm_bound << " violated (k(x,x) = " << kxx << ")";
      throw std::invalid_argument(msg.str());
    }
  }
  return Kernel(CustomForm{std::move(fn), sup_norm_bound, std::move(name)}, dim);
}

double Kernel::eval_unchecked(const Point& x, const Point& xp) const {
  if (const auto* g = std::get_if<GaussianForm>(&form_)) {
    return std::exp(-(x - xp).squaredNorm() / (g->gamma * g->gamma));
  }
  if (std::holds_alternative<LinearForm>(form_)) return x.dot(xp);
  return std::get<CustomForm>(form_).fn(x, xp);
}

bool Kernel::in_domain(const Point& x) const {
  if (x.size() != dim_) return false;
  return !domain_ || domain_->contains(x);
}

double Kernel::operator()(const Point& x, const Point& xp) const {
  if (x.size() != dim_ || xp.size() != dim_) throw std::invalid_argument("Kernel: dimension mismatch");
  if (domain_ && (!domain_->contains(x) || !domain_->contains(xp))) {
    throw std::out_of_range("Kernel: evaluation point outside the kernel's region");
  }
  return eval_unchecked(x, xp);
}

Kernel Kernel::restricted_to(const Region& region) const {
  if (region.dim() != dim_) throw std::invalid_argument("Kernel::restricted_to: region dimension mismatch");
  Kernel out = *this;
  out.domain_ = std::make_shared<const Region>(region);
  return out;
}

double Kernel::sup_norm() const {
  if (std::holds_alternative<GaussianForm>(form_)) return 1.0;
  if (std::holds_alternative<LinearForm>(form_)) {
    return domain_ ? domain_->max_norm() : std::numeric_limits<double>::infinity();
  }
  return std::get<CustomForm>(form_).sup_norm_bound;
}

std::optional<double> Kernel::gamma() const {
  if (const auto* g = std::get_if<GaussianForm>(&form_)) return g->gamma;
  return std::nullopt;
}

std::string Kernel::name() const {
  if (const auto* g = std::get_if<GaussianForm>(&form_)) {
    std::ostringstream s;
    s << "gaussian(" << g->gamma << ")";
    return s.str();
  }
  if (std::holds_alternative<LinearForm>(form_)) return "linear";
  return std::get<CustomForm>(form_).name;
}

nlohmann::json Kernel::to_json() const {
  nlohmann::json j;
  if (const auto* g = std::get_if<GaussianForm>(&form_)) {
    j["form"] = "gaussian";
    j["gamma"] = g->gamma;
  } else if (std::holds_alternative<LinearForm>(form_)) {
    j["form"] = "linear";
  } else {
    throw std::invalid_argument("custom kernels cannot be serialized");
  }
  j["dim"] = dim_;
  return j;
}

Kernel Kernel::from_json(const nlohmann::json& j) {
  const auto form = j.at("form").get<std::string>();
  const int dim = j.value("dim", 1);
  if (form == "gaussian") return gaussian(j.at("gamma").get<double>(), dim);
  if (form == "linear") return linear(dim);
  throw std::invalid_argument("unknown kernel form: " + form);
}

Eigen::MatrixXd gram_matrix(std::span<const Point> points, const Kernel& kernel) {
  if (points.empty()) throw std::invalid_argument("gram_matrix: empty point list");
  for (const auto& p : points) {
    if (p.size() != kernel.dim()) throw std::invalid_argument("gram_matrix: dimension mismatch");
    if (!kernel.in_domain(p)) throw std::out_of_range("gram_matrix: point outside the kernel's region");
  }
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double v = kernel.eval_unchecked(points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(j)]);
      if (!std::isfinite(v)) throw std::domain_error("gram_matrix: non-finite kernel value");
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return m;
}

Eigen::MatrixXd difference_gram(std::span<const Point> points, const Kernel& k_a, double scale_a, const Kernel& k_b) {
  const Eigen::MatrixXd a = gram_matrix(points, k_a);
  const Eigen::MatrixXd b = gram_matrix(points, k_b);
  return scale_a * a - b;
}

double min_eigenvalue(const Eigen::MatrixXd& symmetric) {
  if (!symmetric.allFinite()) throw std::domain_error("min_eigenvalue: non-finite matrix entry");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("min_eigenvalue: eigensolver failed");
  const double v = solver.eigenvalues().minCoeff();
  if (!std::isfinite(v)) throw std::domain_error("min_eigenvalue: non-finite eigenvalue");
  return v;
}

double default_psd_tolerance(std::size_t n) { return 1e-9 * static_cast<double>(n); }

double beta_for_gaussian(double gamma0, double gamma_r, int d) {
  if (!(gamma0 > 0.0) || !(gamma_r > 0.0)) throw std::invalid_argument("beta_for_gaussian: bandwidths must be positive");
  if (d <= 0) throw std::invalid_argument("beta_for_gaussian: d must be positive");
  if (gamma0 < gamma_r) {
    throw std::invalid_argument("beta_for_gaussian: reference bandwidth must dominate the member bandwidth");
  }
  return std::pow(gamma0 / gamma_r, 0.5 * d);
}

bool check_beta_dominance(const Kernel& k_r, const Kernel& k_0, double beta,
                          std::span<const std::vector<Point>> point_sets, std::optional<double> tol_psd) {
  for (const auto& set : point_sets) {
    if (set.size() < 2) throw std::invalid_argument("check_beta_dominance: point sets need at least 2 points");
    const double tol = tol_psd.value_or(default_psd_tolerance(set.size()));
    if (min_eigenvalue(difference_gram(set, k_r, beta * beta, k_0)) < -tol) return false;
  }
  return true;
}

KernelFamily::KernelFamily(Kernel reference, std::vector<KernelFamilyMember> members)
    : reference_(std::move(reference)), members_(std::move(members)) {
  for (const auto& m : members_) {
    if (!(m.beta > 0.0)) throw std::invalid_argument("KernelFamily: betas must be positive");
    if (m.kernel.dim() != reference_.dim()) throw std::invalid_argument("KernelFamily: member dimension mismatch");
  }
}

KernelFamily KernelFamily::gaussian(std::span<const double> bandwidths, int d) {
  if (bandwidths.empty()) throw std::invalid_argument("build_gaussian_family: empty bandwidth list");
  double gamma0 = 0.0;
  for (double g : bandwidths) {
    if (!(g > 0.0) || !std::isfinite(g)) throw std::invalid_argument("build_gaussian_family: bandwidths must be positive and finite");
    gamma0 = std::max(gamma0, g);
  }
  std::vector<KernelFamilyMember> members;
  members.reserve(bandwidths.size());
  for (std::size_t r = 0; r < bandwidths.size(); ++r) {
    std::ostringstream id;
    id << "gaussian:" << bandwidths[r];
    members.push_back({id.str(), Kernel::gaussian(bandwidths[r], d), beta_for_gaussian(gamma0, bandwidths[r], d)});
  }
  return KernelFamily(Kernel::gaussian(gamma0, d), std::move(members));
}

KernelFamily KernelFamily::gaussian_interval(double gamma_min, double gamma_max, int d) {
  if (!(gamma_min >= 0.0) || !(gamma_max > gamma_min) || !std::isfinite(gamma_max)) {
    throw std::invalid_argument("gaussian_interval: need 0 <= gamma_min < gamma_max < inf");
  }
  KernelFamily family(Kernel::gaussian(gamma_max, d), {});
  family.interval_ = Interval{gamma_min, gamma_max, d};
  return family;
}

KernelFamilyMember KernelFamily::member_for_bandwidth(double gamma) const {
  if (!interval_) throw std::logic_error("member_for_bandwidth: family is not an interval family");
  if (!(gamma > interval_->gamma_min && gamma <= interval_->gamma_max)) {
    throw std::out_of_range("member_for_bandwidth: bandwidth outside (gamma_min, gamma_max]");
  }
  std::ostringstream id;
  id << "gaussian:" << gamma;
  return {id.str(), Kernel::gaussian(gamma, interval_->dim), beta_for_gaussian(interval_->gamma_max, gamma, interval_->dim)};
}

bool KernelFamily::certify(std::span<const std::vector<Point>> point_sets, std::optional<double> tol_psd) const {
  for (const auto& m : members_) {
    if (!check_beta_dominance(m.kernel, reference_, m.beta, point_sets, tol_psd)) return false;
  }
  return true;
}

nlohmann::json KernelFamily::to_json() const {
  nlohmann::json j;
  if (const auto g = reference_.gamma()) j["reference_gamma"] = *g;
  j["reference"] = reference_.to_json();
  j["members"] = nlohmann::json::array();
  j["betas"] = nlohmann::json::array();
  for (const auto& m : members_) {
    j["members"].push_back(m.kernel.to_json());
    j["betas"].push_back(m.beta);
  }
  if (interval_) j["interval"] = {interval_->gamma_min, interval_->gamma_max};
  return j;
}

KernelFamily build_gaussian_family(std::span<const double> bandwidths, int d) {
  return KernelFamily::gaussian(bandwidths, d);
}

std::vector<std::vector<Point>> random_point_sets(std::size_t count, std::size_t max_size, int d, double spread,
                                                  std::uint64_t seed) {
  if (max_size < 2) throw std::invalid_argument("random_point_sets: max_size must be at least 2");
  CounterRng rng(CounterRng::derive(seed, static_cast<std::uint64_t>(Stream::kernel_check), 1));
  std::vector<std::vector<Point>> sets(count);
  for (auto& set : sets) {
    const std::size_t size = 2 + rng.below(max_size - 1);
    set.reserve(size);
    for (std::size_t i = 0; i < size; ++i) {
      Point p(d);
      for (int k = 0; k < d; ++k) p[k] = rng.uniform(-spread, spread);
      set.push_back(std::move(p));
    }
  }
  return sets;
}

}  // namespace locsvm
