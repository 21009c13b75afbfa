#include "locsvm/config.hpp"

#include "locsvm/parallel.hpp"
#include "locsvm/schedules.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace locsvm {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    field.erase(0, field.find_first_not_of(" \t\r"));
    field.erase(field.find_last_not_of(" \t\r") + 1);
    out.push_back(field);
  }
  return out;
}

std::optional<std::vector<double>> parse_numbers(const std::vector<std::string>& fields) {
  std::vector<double> v;
  for (const auto& f : fields) {
    double x = 0.0;
    const auto res = std::from_chars(f.data(), f.data() + f.size(), x);
    if (res.ec != std::errc() || res.ptr != f.data() + f.size()) return std::nullopt;
    v.push_back(x);
  }
  return v;
}

std::vector<std::vector<double>> read_numeric_rows(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_csv_line(line);
    auto nums = parse_numbers(fields);
    if (!nums) {
      if (rows.empty() && line_no == 1) continue;
      throw std::invalid_argument("CSV line " + std::to_string(line_no) + " is not numeric");
    }
    if (!rows.empty() && nums->size() != rows.front().size()) {
      throw std::invalid_argument("CSV line " + std::to_string(line_no) + " has the wrong number of columns");
    }
    rows.push_back(std::move(*nums));
  }
  return rows;
}

WeightKind weight_kind_from_json(const nlohmann::json& j, Bump& bump) {
  const auto kind = j.value("weights", std::string("indicator"));
  bump = j.value("bump", std::string("cone")) == "plateau" ? Bump::plateau : Bump::cone;
  if (kind == "indicator") return WeightKind::indicator;
  if (kind == "membership") return WeightKind::membership;
  throw std::invalid_argument("unknown weight scheme '" + kind + "'");
}

Box probe_box(const Regionalization& r, const std::optional<SyntheticDistribution>& dist, const nlohmann::json& j) {
  if (j.contains("probe_bounds")) return box_from_json(j.at("probe_bounds"));
  if (r.domain()) return *r.domain();
  if (dist) return dist->support();
  Box b;
  bool have = false;
  for (const auto& region : r.regions()) {
    if (auto bb = region.bounding_box()) {
      if (!have) {
        b = *bb;
        have = true;
      } else {
        b.lo = b.lo.cwiseMin(bb->lo);
        b.hi = b.hi.cwiseMax(bb->hi);
      }
    }
  }
  if (!have) throw std::invalid_argument("validate: give probe_bounds for unbounded regionalizations");
  return b;
}

std::vector<double> nominal_grid_of(const nlohmann::json& j) {
  if (!j.contains("nominal_grid")) return default_n_grid();
  const auto& g = j.at("nominal_grid");
  return power_of_two_grid(g.at("lo_exp").get<int>(), g.at("hi_exp").get<int>());
}

bool is_recipe(const nlohmann::json& rj) {
  const auto type = rj.at("type").get<std::string>();
  if (type == "whole") return true;
  if (type == "voronoi") return rj.contains("m") && !rj.contains("centers");
  if (type == "grid") return !rj.contains("bounds");
  return false;
}

}  // namespace

nlohmann::json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

Dataset read_dataset_csv(std::istream& in) {
  Dataset out;
  for (auto& row : read_numeric_rows(in)) {
    if (row.size() < 2) throw std::invalid_argument("dataset CSV needs at least one input column and y");
    Point x = Eigen::Map<const Eigen::VectorXd>(row.data(), static_cast<Eigen::Index>(row.size() - 1));
    out.push_back(Sample{std::move(x), row.back()});
  }
  return out;
}

std::vector<Point> read_points_csv(std::istream& in) {
  std::vector<Point> out;
  for (auto& row : read_numeric_rows(in)) {
    out.push_back(Eigen::Map<const Eigen::VectorXd>(row.data(), static_cast<Eigen::Index>(row.size())));
  }
  return out;
}

WeightScheme FitSetup::weights() const { return WeightScheme(regionalization, weight_kind, bump); }

KernelAssignment FitSetup::kernels() const {
  const int d = regionalization->dim();
  std::vector<double> distinct = gammas;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  const auto family = KernelFamily::gaussian(distinct, d);
  KernelAssignment a({family}, gammas.size());
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    const auto it = std::lower_bound(distinct.begin(), distinct.end(), gammas[i]);
    a.set(i, 0, static_cast<std::size_t>(it - distinct.begin()));
  }
  return a;
}

FitSetup fit_setup_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir,
                             std::optional<std::uint64_t> seed_override) {
  FitSetup s;
  const auto& dj = j.at("data");
  s.seed = seed_override.value_or(dj.value("seed", std::uint64_t{1}));
  if (dj.contains("csv")) {
    std::filesystem::path p = dj.at("csv").get<std::string>();
    if (p.is_relative()) p = base_dir / p;
    std::ifstream in(p);
    if (!in) throw std::runtime_error("cannot open " + p.string());
    s.data = read_dataset_csv(in);
  } else {
    s.distribution = SyntheticDistribution::from_json(dj.at("distribution"));
    s.data = s.distribution->sample(dj.at("n").get<std::size_t>(), s.seed, Stream::training);
  }
  if (j.contains("loss")) s.loss = DistanceBasedLoss::from_json(j.at("loss"));
  if (j.contains("solver")) s.solver = SolverOptions::from_json(j.at("solver"));
  s.threads = j.contains("threads") ? j.at("threads").get<std::size_t>() : default_thread_count();

  const auto& rj = j.at("regionalization");
  if (is_recipe(rj)) {
    if (!s.distribution && rj.at("type").get<std::string>() != "whole") {
      throw std::invalid_argument("regionalization recipe needs a synthetic distribution; give explicit bounds/centers");
    }
    if (s.distribution) {
      s.regionalization = build_regionalization(RegionRecipe::from_json(rj), *s.distribution, s.data.size(), s.seed);
    } else {
      const int d = s.data.empty() ? 1 : static_cast<int>(s.data.front().x.size());
      s.regionalization = std::make_shared<const Regionalization>(std::vector<Region>{Region::whole(d, 0)}, 1, true);
    }
  } else {
    s.regionalization = std::make_shared<const Regionalization>(Regionalization::from_json(rj));
  }
  const std::size_t m = s.regionalization->size();

  if (j.contains("weights")) s.weight_kind = weight_kind_from_json(j.at("weights"), s.bump);

  const auto& kj = j.at("kernel");
  if (kj.contains("gammas")) {
    s.gammas = kj.at("gammas").get<std::vector<double>>();
    if (s.gammas.size() != m) throw std::invalid_argument("kernel.gammas needs one bandwidth per region");
  } else {
    s.gammas.assign(m, kj.at("gamma").get<double>());
  }

  if (j.contains("lambdas")) {
    s.lambdas = j.at("lambdas").get<std::vector<double>>();
    if (s.lambdas.size() != m) throw std::invalid_argument("lambdas needs one value per region");
  } else if (j.contains("lambda")) {
    s.lambdas.assign(m, j.at("lambda").get<double>());
  } else {
    s.schedule = LambdaSchedule::from_json(j.at("schedule"));
    const Assignment parts = assign(s.data, *s.regionalization);
    s.lambdas = s.schedule->lambdas(s.data.size(), parts.counts);
  }
  return s;
}

LocalizedModel run_fit(const FitSetup& s) {
  return fit_localized(s.data, s.regionalization, s.lambdas, s.kernels(), s.loss, s.weights(), s.solver, s.threads);
}

SweepConfig sweep_config_from_json(const nlohmann::json& j, std::optional<std::uint64_t> seed_override) {
  SweepConfig c = SweepConfig::from_json(j);
  if (seed_override) c.seeds = {*seed_override};
  if (!j.contains("threads")) c.threads = default_thread_count();
  return c;
}

ValidationResult validate_config(const nlohmann::json& j, const std::filesystem::path& base_dir,
                                 std::optional<std::uint64_t> seed_override) {
  ValidationResult out;
  std::ostringstream table;
  const std::size_t probes = j.value("probes", kDefaultProbeCount);
  bool ok = true;

  auto structural = [&](const std::shared_ptr<const Regionalization>& r, const std::optional<SyntheticDistribution>& dist,
                        WeightKind kind, Bump bump, const std::string& label) {
    const auto pts = probe_points(probe_box(*r, dist, j), probes);
    const auto rr = validate_regionalization(*r, pts);
    const auto wr = validate_weights(WeightScheme(r, kind, bump), pts);
    const bool this_ok = rr.r1_ok && rr.r2_ok && wr.ok();
    ok = ok && this_ok;
    table << label << ": m=" << r->size() << " R1 " << (rr.r1_ok ? "ok" : "FAIL") << ", R2 "
          << (rr.r2_ok ? "ok" : "FAIL") << " (max overlap " << rr.observed_max_overlap << " / s_max "
          << r->s_max_declared() << "), W1-W3 " << (wr.ok() ? "ok" : "FAIL") << " (max sum error "
          << wr.max_sum_error << ")\n";
    return nlohmann::json{{"label", label}, {"regions", r->size()}, {"regionalization", rr.to_json()},
                          {"weights", wr.to_json()}};
  };

  if (j.contains("n_grid")) {
    const SweepConfig c = sweep_config_from_json(j, seed_override);
    const std::uint64_t seed = c.seeds.front();
    const auto exps = growth_exponents(c.loss.growth_p(), c.p2_epsilon);
    nlohmann::json per_n = nlohmann::json::array();
    std::vector<std::vector<double>> lambdas, betas, counts;
    std::vector<double> a_hat, grid;
    for (auto n : c.n_grid) {
      auto r = build_regionalization(c.regions, c.distribution, n, seed);
      per_n.push_back(structural(r, c.distribution, c.weights, c.bump, "n=" + std::to_string(n)));
      const Assignment parts = assign(c.distribution.sample(n, seed, Stream::training), *r);
      lambdas.push_back(c.schedule.lambdas(n, parts.counts));
      betas.emplace_back(r->size(), 1.0);
      counts.emplace_back(parts.counts.begin(), parts.counts.end());
      a_hat.push_back(static_cast<double>(parts.a_hat));
      grid.push_back(static_cast<double>(n));
    }
    out.report["structural"] = per_n;

    const std::vector<double> nominal_grid = nominal_grid_of(j);
    const auto nominal = nominal_condition_report(
        c.schedule, nominal_grid, [&](double n) { return c.regions.regions_for(static_cast<std::size_t>(n)); }, 1.0,
        exps, c.variant);
    out.report["schedule_nominal"] = nominal.to_json();
    table << "schedule (nominal: d_i = n/m, A_hat = m)\n" << nominal.table();
    ok = ok && nominal.ok();
    if (grid.size() >= kMinGridPoints) {
      const auto empirical = condition_report(grid, lambdas, betas, counts, a_hat, exps, c.variant);
      out.report["schedule_empirical"] = empirical.to_json();
      table << "schedule (empirical counts, seed " << seed << ")\n" << empirical.table();
    }
  } else {
    const FitSetup s = fit_setup_from_json(j, base_dir, seed_override);
    out.report["structural"] = nlohmann::json::array({structural(s.regionalization, s.distribution, s.weight_kind,
                                                                  s.bump, "fit")});
    bool lambdas_ok = true;
    for (double l : s.lambdas) lambdas_ok = lambdas_ok && l > 0.0 && (!s.schedule || l < s.schedule->C);
    out.report["lambdas"] = s.lambdas;
    out.report["lambdas_ok"] = lambdas_ok;
    table << "lambdas " << (lambdas_ok ? "ok" : "FAIL") << "\n";
    ok = ok && lambdas_ok;
    if (s.schedule) {
      const auto exps = growth_exponents(s.loss.growth_p());
      const std::size_t m = s.regionalization->size();
      const auto nominal = nominal_condition_report(*s.schedule, nominal_grid_of(j), [m](double) { return m; }, 1.0,
                                                    exps, GrowVariant::lp);
      out.report["schedule_nominal"] = nominal.to_json();
      table << "schedule (nominal: d_i = n/m, A_hat = m)\n" << nominal.table();
      ok = ok && nominal.ok();
    }
  }
  out.report["ok"] = ok;
  out.ok = ok;
  out.table = table.str();
  return out;
}

}  // namespace locsvm
