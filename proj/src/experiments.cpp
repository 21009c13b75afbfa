#include "locsvm/experiments.hpp"

#include "locsvm/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace locsvm {

namespace {

void require_mc(std::size_t n_mc) {
  if (n_mc < kMinMonteCarlo) throw std::invalid_argument("Monte Carlo size must be at least 1000");
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double std_error_of_mean(std::span<const double> v, double mean) {
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

}  // namespace

Estimate lp_distance_from_values(std::span<const double> f_values, std::span<const double> f_star_values, double p) {
  if (f_values.size() != f_star_values.size() || f_values.empty()) {
    throw std::invalid_argument("lp_distance: value vectors must be nonempty and of equal length");
  }
  if (!(p >= 1.0)) throw std::invalid_argument("lp_distance: p must be >= 1");
  const std::size_t n = f_values.size();
  std::vector<double> a(n);
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    a[k] = std::pow(std::abs(f_values[k] - f_star_values[k]), p);
    total += a[k];
  }
  Estimate e;
  e.value = std::pow(total / static_cast<double>(n), 1.0 / p);
  if (n < 2) return e;
  // Leave-one-out replicates of (mean)^{1/p}.
  const double dn = static_cast<double>(n);
  std::vector<double> theta(n);
  double theta_bar = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    theta[k] = std::pow(std::max(0.0, (total - a[k]) / (dn - 1.0)), 1.0 / p);
    theta_bar += theta[k];
  }
  theta_bar /= dn;
  double ss = 0.0;
  for (double t : theta) ss += (t - theta_bar) * (t - theta_bar);
  e.std_error = std::sqrt((dn - 1.0) / dn * ss);
  return e;
}

Estimate estimate_lp_distance(const Predictor& f, const Predictor& f_star, const SyntheticDistribution& dist, double p,
                              std::size_t n_mc, std::uint64_t seed) {
  require_mc(n_mc);
  const auto xs = dist.sample_inputs(n_mc, seed, Stream::evaluation);
  std::vector<double> fv, sv;
  fv.reserve(n_mc);
  sv.reserve(n_mc);
  for (const auto& x : xs) {
    fv.push_back(f(x));
    sv.push_back(f_star(x));
  }
  return lp_distance_from_values(fv, sv, p);
}

std::vector<Point> EvaluationSet::inputs() const {
  std::vector<Point> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.x);
  return out;
}

EvaluationSet make_evaluation_set(const SyntheticDistribution& dist, const DistanceBasedLoss& loss, std::size_t n_mc,
                                  std::uint64_t seed) {
  require_mc(n_mc);
  EvaluationSet e;
  e.samples = dist.sample(n_mc, seed, Stream::evaluation);
  e.bayes_values.reserve(n_mc);
  for (const auto& s : e.samples) e.bayes_values.push_back(dist.bayes_function(loss, s.x));
  return e;
}

ExcessRiskEstimate excess_risk_from_predictions(std::span<const double> predictions, const EvaluationSet& eval,
                                                const DistanceBasedLoss& loss, double bayes_risk) {
  const std::size_t n = eval.samples.size();
  if (predictions.size() != n || n == 0) throw std::invalid_argument("excess_risk: one prediction per draw required");
  std::vector<double> risk(n), diff(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double y = eval.samples[k].y;
    risk[k] = loss(y, predictions[k]);
    diff[k] = risk[k] - loss(y, eval.bayes_values[k]);
  }
  ExcessRiskEstimate e;
  e.n_mc = n;
  e.risk = mean_of(risk);
  e.risk_se = std_error_of_mean(risk, e.risk);
  e.bayes_risk = bayes_risk;
  e.excess = mean_of(diff);
  e.excess_se = std_error_of_mean(diff, e.excess);
  return e;
}

ExcessRiskEstimate estimate_excess_risk(const Predictor& f, const SyntheticDistribution& dist,
                                        const DistanceBasedLoss& loss, std::size_t n_mc, std::uint64_t seed) {
  const EvaluationSet eval = make_evaluation_set(dist, loss, n_mc, seed);
  std::vector<double> preds;
  preds.reserve(n_mc);
  for (const auto& s : eval.samples) preds.push_back(f(s.x));
  return excess_risk_from_predictions(preds, eval, loss, dist.bayes_risk(loss));
}

void NormAudit::check(const LocalModel& model, const Dataset& region_data, const DistanceBasedLoss& loss,
                      std::span<const Point> grid) {
  ++models_checked;
  if (model.is_zero_model()) return;
  const double norm = rkhs_norm(model);
  double r0 = 0.0;
  for (const auto& s : region_data) r0 += loss(s.y, 0.0);
  r0 /= static_cast<double>(region_data.size());
  const double norm_bound = std::sqrt(r0 / model.lambda());
  const double kernel_sup = model.kernel().sup_norm();
  double sup = 0.0;
  for (const auto& x : grid) {
    if (model.kernel().in_domain(x)) sup = std::max(sup, std::abs(model(x)));
  }
  const double sup_bound = kernel_sup * norm;
  const double norm_ratio = norm_bound > 0.0 ? norm / norm_bound : (norm > 0.0 ? INFINITY : 0.0);
  const double sup_ratio = sup_bound > 0.0 ? sup / sup_bound : (sup > 0.0 ? INFINITY : 0.0);
  worst_norm_ratio = std::max(worst_norm_ratio, norm_ratio);
  worst_sup_ratio = std::max(worst_sup_ratio, sup_ratio);
  const double slack = 1.0 + kNormAuditSlack;
  if (norm > norm_bound * slack + 1e-12 || sup > sup_bound * slack + 1e-12) {
    ++violations;
    if (messages.size() < 20) {
      std::ostringstream msg;
      msg << "region " << model.region_index() << ": norm " << norm << " (bound " << norm_bound << "), grid sup "
          << sup << " (bound " << sup_bound << ")";
      messages.push_back(msg.str());
    }
  }
}

void NormAudit::check(const LocalizedModel& model, const Assignment& assignment, std::span<const Point> grid) {
  for (std::size_t i = 0; i < model.local_models().size(); ++i) {
    check(model.local_model(i), assignment.per_region_data[i], model.loss(), grid);
  }
}

void NormAudit::merge(const NormAudit& other) {
  models_checked += other.models_checked;
  violations += other.violations;
  worst_norm_ratio = std::max(worst_norm_ratio, other.worst_norm_ratio);
  worst_sup_ratio = std::max(worst_sup_ratio, other.worst_sup_ratio);
  for (const auto& m : other.messages) {
    if (messages.size() < 20) messages.push_back(m);
  }
}

nlohmann::json NormAudit::to_json() const {
  return {{"models_checked", models_checked}, {"violations", violations}, {"worst_norm_ratio", worst_norm_ratio},
          {"worst_sup_ratio", worst_sup_ratio}, {"messages", messages}};
}

std::size_t RegionRecipe::regions_for(std::size_t n) const {
  switch (kind) {
    case Kind::whole:
      return 1;
    case Kind::grid: {
      std::size_t m = 1;
      for (int c : cells) m *= static_cast<std::size_t>(c);
      return m;
    }
    case Kind::voronoi:
      if (fixed_m) return *fixed_m;
      return static_cast<std::size_t>(
          std::max(1.0, std::ceil(m_scale * std::pow(static_cast<double>(n), m_exponent) - 1e-12)));
    case Kind::balls:
      return centers.size();
  }
  return 0;
}

nlohmann::json RegionRecipe::to_json() const {
  nlohmann::json j;
  switch (kind) {
    case Kind::whole:
      j["type"] = "whole";
      break;
    case Kind::grid:
      j["type"] = "grid";
      if (bounds) j["bounds"] = box_to_json(*bounds);
      j["cells"] = cells;
      break;
    case Kind::voronoi:
      j["type"] = "voronoi";
      if (fixed_m) {
        j["m"] = *fixed_m;
      } else {
        j["m"] = {{"scale", m_scale}, {"exponent", m_exponent}};
      }
      j["split_fraction"] = split_fraction;
      break;
    case Kind::balls:
      j["type"] = "balls";
      j["centers"] = nlohmann::json::array();
      for (const auto& c : centers) j["centers"].push_back(point_to_json(c));
      j["radius"] = radius;
      break;
  }
  return j;
}

RegionRecipe RegionRecipe::from_json(const nlohmann::json& j) {
  RegionRecipe r;
  const auto type = j.at("type").get<std::string>();
  if (type == "whole") {
    r.kind = Kind::whole;
  } else if (type == "grid") {
    r.kind = Kind::grid;
    if (j.contains("bounds")) r.bounds = box_from_json(j.at("bounds"));
    r.cells = j.at("cells").get<std::vector<int>>();
  } else if (type == "voronoi") {
    r.kind = Kind::voronoi;
    const auto& m = j.at("m");
    if (m.is_number_integer()) {
      r.fixed_m = m.get<std::size_t>();
    } else {
      r.m_scale = m.value("scale", 1.0);
      r.m_exponent = m.value("exponent", 0.25);
    }
    r.split_fraction = j.value("split_fraction", 1.0);
    if (!(r.split_fraction > 0.0)) throw std::invalid_argument("voronoi recipe: split_fraction must be positive");
  } else if (type == "balls") {
    r.kind = Kind::balls;
    for (const auto& c : j.at("centers")) r.centers.push_back(point_from_json(c));
    r.radius = j.at("radius").get<double>();
  } else {
    throw std::invalid_argument("unknown regionalization recipe '" + type + "'");
  }
  return r;
}

std::shared_ptr<const Regionalization> build_regionalization(const RegionRecipe& recipe,
                                                             const SyntheticDistribution& dist, std::size_t n,
                                                             std::uint64_t seed) {
  switch (recipe.kind) {
    case RegionRecipe::Kind::whole:
      return std::make_shared<const Regionalization>(std::vector<Region>{Region::whole(dist.dim(), 0)}, 1, true);
    case RegionRecipe::Kind::grid:
      return std::make_shared<const Regionalization>(grid_partition(recipe.bounds.value_or(dist.support()), recipe.cells));
    case RegionRecipe::Kind::voronoi: {
      const std::size_t m = recipe.regions_for(n);
      const auto split_size = std::max<std::size_t>(
          m, static_cast<std::size_t>(std::ceil(recipe.split_fraction * static_cast<double>(n))));
      const std::uint64_t split_seed =
          CounterRng::derive(seed, static_cast<std::uint64_t>(Stream::regionalization_split), n);
      const auto split = dist.sample_inputs(split_size, split_seed, Stream::regionalization_split);
      const std::uint64_t kmeans_seed = CounterRng::derive(seed, static_cast<std::uint64_t>(Stream::kmeans_init), n);
      return std::make_shared<const Regionalization>(voronoi_from_split(split, m, kmeans_seed, dist.support()));
    }
    case RegionRecipe::Kind::balls:
      return std::make_shared<const Regionalization>(overlapping_cover(recipe.centers, recipe.radius, dist.support()));
  }
  throw std::logic_error("build_regionalization: unknown recipe");
}

nlohmann::json SweepConfig::to_json() const {
  nlohmann::json j;
  j["distribution"] = distribution.to_json();
  j["loss"] = loss.to_json();
  j["regionalization"] = regions.to_json();
  j["weights"] = weights == WeightKind::indicator
                     ? nlohmann::json{{"weights", "indicator"}}
                     : nlohmann::json{{"weights", "membership"}, {"bump", bump == Bump::cone ? "cone" : "plateau"}};
  j["kernel"] = {{"gamma", gamma}};
  j["schedule"] = schedule.to_json();
  j["n_grid"] = n_grid;
  j["seeds"] = seeds;
  j["n_mc"] = n_mc;
  if (p) j["p"] = *p;
  j["variant"] = to_string(variant);
  j["p2_epsilon"] = p2_epsilon;
  j["solver"] = solver.to_json();
  j["threads"] = threads;
  return j;
}

SweepConfig SweepConfig::from_json(const nlohmann::json& j) {
  SweepConfig c;
  c.distribution = SyntheticDistribution::from_json(j.at("distribution"));
  c.loss = DistanceBasedLoss::from_json(j.at("loss"));
  c.regions = RegionRecipe::from_json(j.at("regionalization"));
  if (j.contains("weights")) {
    const auto& w = j.at("weights");
    const auto kind = w.value("weights", std::string("indicator"));
    if (kind == "indicator") {
      c.weights = WeightKind::indicator;
    } else if (kind == "membership") {
      c.weights = WeightKind::membership;
      c.bump = w.value("bump", std::string("cone")) == "plateau" ? Bump::plateau : Bump::cone;
    } else {
      throw std::invalid_argument("unknown weight scheme '" + kind + "'");
    }
  }
  c.gamma = j.at("kernel").at("gamma").get<double>();
  c.schedule = LambdaSchedule::from_json(j.at("schedule"));
  c.n_grid = j.at("n_grid").get<std::vector<std::size_t>>();
  c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  c.n_mc = j.value("n_mc", c.n_mc);
  if (j.contains("p")) c.p = j.at("p").get<double>();
  if (j.contains("variant")) c.variant = grow_variant_from_string(j.at("variant").get<std::string>());
  c.p2_epsilon = j.value("p2_epsilon", c.p2_epsilon);
  if (j.contains("solver")) c.solver = SolverOptions::from_json(j.at("solver"));
  c.threads = j.value("threads", c.threads);
  c.audit_probes = j.value("audit_probes", c.audit_probes);
  if (c.n_grid.empty() || c.seeds.empty()) throw std::invalid_argument("sweep config: empty n_grid or seeds");
  return c;
}

SweepRow sweep_cell(const SweepConfig& config, std::size_t n, std::uint64_t seed, const EvaluationSet& eval,
                    NormAudit* audit) {
  const auto start = std::chrono::steady_clock::now();
  const auto& dist = config.distribution;
  auto r = build_regionalization(config.regions, dist, n, seed);
  const Dataset data = dist.sample(n, seed, Stream::training);
  const Assignment parts = assign(data, *r);
  const std::vector<double> lambdas = config.schedule.lambdas(n, parts.counts);
  const WeightScheme weights(r, config.weights, config.bump);
  const auto kernels = KernelAssignment::uniform(Kernel::gaussian(config.gamma, dist.dim()), r->size());
  const LocalizedModel model = fit_localized(data, r, lambdas, kernels, config.loss, weights, config.solver, 1);

  std::vector<double> preds;
  preds.reserve(eval.samples.size());
  for (const auto& s : eval.samples) preds.push_back(model(s.x));

  SweepRow row;
  row.n = n;
  row.seed = seed;
  row.m_n = r->size();
  row.a_hat = parts.a_hat;
  const Estimate lp = lp_distance_from_values(preds, eval.bayes_values, config.lp_exponent());
  row.lp_dist = lp.value;
  row.lp_se = lp.std_error;
  const auto ex = excess_risk_from_predictions(preds, eval, config.loss, dist.bayes_risk(config.loss));
  row.risk = ex.risk;
  row.bayes_risk = ex.bayes_risk;
  row.excess = ex.excess;
  row.excess_se = ex.excess_se;

  std::vector<double> counts(parts.counts.begin(), parts.counts.end());
  std::vector<double> betas(r->size(), 1.0);
  row.cond_shrink = shrink_quantity(betas, lambdas, counts);
  row.cond_grow = grow_quantity(lambdas, counts, static_cast<double>(std::max<std::size_t>(parts.a_hat, 1)),
                                growth_exponents(config.loss.growth_p(), config.p2_epsilon), config.variant);

  if (audit != nullptr) {
    const auto grid = probe_points(dist.support(), config.audit_probes);
    audit->check(model, parts, grid);
  }
  row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return row;
}

SweepResult consistency_sweep(const SweepConfig& config) {
  std::map<std::uint64_t, EvaluationSet> evals;
  for (auto seed : config.seeds) {
    if (!evals.count(seed)) evals.emplace(seed, make_evaluation_set(config.distribution, config.loss, config.n_mc, seed));
  }
  struct Cell {
    std::size_t n;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (auto n : config.n_grid) {
    for (auto seed : config.seeds) cells.push_back({n, seed});
  }
  std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
    return a.n != b.n ? a.n < b.n : a.seed < b.seed;
  });
  std::vector<std::optional<SweepRow>> rows(cells.size());
  std::vector<std::optional<std::string>> failures(cells.size());
  std::vector<NormAudit> audits(cells.size());
  parallel_for(cells.size(), config.threads, [&](std::size_t k) {
    try {
      rows[k] = sweep_cell(config, cells[k].n, cells[k].seed, evals.at(cells[k].seed), &audits[k]);
    } catch (const std::exception& e) {
      failures[k] = e.what();
    }
  });
  SweepResult result;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (rows[k]) result.rows.push_back(*rows[k]);
    if (failures[k]) result.errors.push_back({cells[k].n, cells[k].seed, *failures[k]});
    result.audit.merge(audits[k]);
  }
  return result;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << kSweepCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.n << ',' << r.seed << ',' << r.m_n << ',' << r.a_hat << ',' << format_double(r.lp_dist) << ','
        << format_double(r.lp_se) << ',' << format_double(r.risk) << ',' << format_double(r.bayes_risk) << ','
        << format_double(r.excess) << ',' << format_double(r.cond_shrink) << ',' << format_double(r.cond_grow) << ','
        << format_double(r.wall_ms) << '\n';
  }
}

}  // namespace locsvm
