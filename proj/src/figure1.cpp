#include "locsvm/figure1.hpp"

#include "locsvm/distributions.hpp"
#include "locsvm/localized.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace locsvm {

std::vector<SinePiece> figure1_default_pieces() {
  return {
      SinePiece{0.0, 3.0, 0.0, 0.0, 1.0, 1.0 / 6.0, 0.0},
      SinePiece{3.0, 6.0, -2.0, 2.0 / 3.0, 0.5, 1.0 / 3.0, 0.0},
      SinePiece{6.0, 9.0, 0.0, 0.0, 0.8, 1.5, 0.0},
  };
}

Target figure1_default_target() { return Target::piecewise(figure1_default_pieces()); }

double figure1_target(double x) {
  static const Target target = figure1_default_target();
  return target(make_point({x}));
}

nlohmann::json Figure1Config::to_json() const {
  nlohmann::json j = target().to_json();
  return {{"target", j},
          {"sigma", sigma},
          {"n", n},
          {"validation_fraction", validation_fraction},
          {"n_test", n_test},
          {"gammas", gammas},
          {"lambdas", lambdas},
          {"boundaries", boundaries},
          {"seed", seed},
          {"curve_points", curve_points}};
}

Figure1Config Figure1Config::from_json(const nlohmann::json& j) {
  Figure1Config c;
  if (j.contains("target")) {
    const Target t = Target::from_json(j.at("target"));
    if (t.pieces() == nullptr) throw std::invalid_argument("figure1 config: target must be piecewise");
    c.pieces = *t.pieces();
  }
  c.sigma = j.value("sigma", c.sigma);
  c.n = j.value("n", c.n);
  c.validation_fraction = j.value("validation_fraction", c.validation_fraction);
  c.n_test = j.value("n_test", c.n_test);
  c.gammas = j.value("gammas", c.gammas);
  c.lambdas = j.value("lambdas", c.lambdas);
  c.boundaries = j.value("boundaries", c.boundaries);
  c.seed = j.value("seed", c.seed);
  c.curve_points = j.value("curve_points", c.curve_points);
  if (c.gammas.empty() || c.lambdas.empty()) throw std::invalid_argument("figure1 config: empty tuning grid");
  if (!(c.validation_fraction > 0.0 && c.validation_fraction < 1.0)) {
    throw std::invalid_argument("figure1 config: validation_fraction must lie in (0, 1)");
  }
  return c;
}

nlohmann::json Figure1Record::to_json() const {
  return {{"seed", seed},
          {"mse_global", mse_global},
          {"mse_localized", mse_localized},
          {"noisy_mse_global", noisy_mse_global},
          {"noisy_mse_localized", noisy_mse_localized},
          {"global_gamma", global_gamma},
          {"global_lambda", global_lambda},
          {"region_gammas", region_gammas},
          {"region_lambdas", region_lambdas}};
}

namespace {

struct Choice {
  double gamma = 0.0;
  double lambda = 0.0;
  double score = std::numeric_limits<double>::infinity();
};

double validation_mse(const LocalModel& m, const Dataset& val) {
  double s = 0.0;
  for (const auto& v : val) {
    const double r = v.y - m(v.x);
    s += r * r;
  }
  return s / static_cast<double>(val.size());
}

// Grid search on (gamma, lambda); ties keep the earlier grid point.
Choice tune(const Dataset& train, const Dataset& val, const Figure1Config& c, const Region* region,
            NormAudit* audit, std::span<const Point> grid) {
  const auto loss = DistanceBasedLoss::least_squares();
  Choice best;
  best.gamma = c.gammas.front();
  best.lambda = c.lambdas.front();
  if (val.empty() || train.empty()) return best;
  for (double g : c.gammas) {
    Kernel k = Kernel::gaussian(g, 1);
    if (region != nullptr) k = k.restricted_to(*region);
    for (double l : c.lambdas) {
      const LocalModel m = fit_svm(train, k, l, loss);
      if (audit != nullptr) audit->check(m, train, loss, grid);
      const double score = validation_mse(m, val);
      if (score < best.score) best = Choice{g, l, score};
    }
  }
  return best;
}

}  // namespace

Figure1Record figure1_experiment(const Figure1Config& c, Figure1Curves* curves, NormAudit* audit) {
  const Target target = c.target();
  const Box support = Box::interval(c.lo(), c.hi());
  const auto dist = SyntheticDistribution::gaussian_noise(support, target, c.sigma);
  const auto loss = DistanceBasedLoss::least_squares();

  const Dataset data = dist.sample(c.n, c.seed, Stream::training);
  const auto n_val = static_cast<std::size_t>(std::llround(c.validation_fraction * static_cast<double>(c.n)));
  const Dataset train(data.begin(), data.end() - static_cast<std::ptrdiff_t>(n_val));
  const Dataset val(data.end() - static_cast<std::ptrdiff_t>(n_val), data.end());

  std::vector<double> edges = {c.lo()};
  edges.insert(edges.end(), c.boundaries.begin(), c.boundaries.end());
  edges.push_back(c.hi());
  std::vector<Region> cells;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    cells.push_back(Region::interval(edges[i], edges[i + 1], i + 2 == edges.size(), i));
  }
  auto r = std::make_shared<const Regionalization>(cells, 1, true, support);

  std::vector<Point> grid;
  if (audit != nullptr) grid = probe_points(support, 512);

  Figure1Record rec;
  rec.seed = c.seed;
  const Choice global_choice = tune(train, val, c, nullptr, audit, grid);
  rec.global_gamma = global_choice.gamma;
  rec.global_lambda = global_choice.lambda;
  const LocalizedModel global =
      fit_global(data, Kernel::gaussian(global_choice.gamma, 1), global_choice.lambda, loss);

  const Assignment train_parts = assign(train, *r);
  const Assignment val_parts = assign(val, *r);
  std::vector<double> lambdas;
  for (std::size_t i = 0; i < r->size(); ++i) {
    const Choice ch =
        tune(train_parts.per_region_data[i], val_parts.per_region_data[i], c, &r->region(i), audit, grid);
    rec.region_gammas.push_back(ch.gamma);
    rec.region_lambdas.push_back(ch.lambda);
    lambdas.push_back(ch.lambda);
  }
  const auto family = KernelFamily::gaussian(c.gammas, 1);
  KernelAssignment assignment({family}, r->size());
  for (std::size_t i = 0; i < r->size(); ++i) {
    for (std::size_t k = 0; k < family.size(); ++k) {
      if (family.member(k).kernel.gamma() == rec.region_gammas[i]) assignment.set(i, 0, k);
    }
  }
  const LocalizedModel local = fit_localized(data, r, lambdas, assignment, loss, indicator_weights(r));
  if (audit != nullptr) {
    audit->check(global.local_model(0), data, loss, grid);
    audit->check(local, assign(data, *r), grid);
  }

  const Dataset test = dist.sample(c.n_test, c.seed, Stream::test);
  double sg = 0.0, sl = 0.0, ng = 0.0, nl = 0.0;
  for (const auto& s : test) {
    const double f = target(s.x);
    const double pg = global(s.x);
    const double pl = local(s.x);
    sg += (pg - f) * (pg - f);
    sl += (pl - f) * (pl - f);
    ng += (pg - s.y) * (pg - s.y);
    nl += (pl - s.y) * (pl - s.y);
  }
  const double nt = static_cast<double>(test.size());
  rec.mse_global = sg / nt;
  rec.mse_localized = sl / nt;
  rec.noisy_mse_global = ng / nt;
  rec.noisy_mse_localized = nl / nt;

  if (curves != nullptr) {
    *curves = {};
    for (std::size_t k = 0; k < c.curve_points; ++k) {
      const double x = c.lo() + (c.hi() - c.lo()) * static_cast<double>(k) / static_cast<double>(c.curve_points - 1);
      const Point px = make_point({x});
      curves->x.push_back(x);
      curves->target.push_back(target(px));
      curves->global.push_back(global(px));
      curves->localized.push_back(local(px));
    }
  }
  return rec;
}

}  // namespace locsvm
