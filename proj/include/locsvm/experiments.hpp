#pragma once

#include "locsvm/distributions.hpp"
#include "locsvm/localized.hpp"
#include "locsvm/regionalize.hpp"
#include "locsvm/schedules.hpp"
#include "locsvm/weights.hpp"

#include <json.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace locsvm {

inline constexpr std::size_t kMinMonteCarlo = 1000;

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// (mean |f - f*|^p)^{1/p} over P^X draws, with jackknife standard error.
Estimate estimate_lp_distance(const Predictor& f, const Predictor& f_star, const SyntheticDistribution& dist, double p,
                              std::size_t n_mc, std::uint64_t seed);
/// Same estimator on precomputed function values.
Estimate lp_distance_from_values(std::span<const double> f_values, std::span<const double> f_star_values, double p);

struct ExcessRiskEstimate {
  double risk = 0.0;
  double risk_se = 0.0;
  double bayes_risk = 0.0;
  /// Mean of L(y, f(x)) - L(y, f*(x)) over the same draws.
  double excess = 0.0;
  double excess_se = 0.0;
  std::size_t n_mc = 0;
};

/// Fresh draws from P with their Bayes values, reused across estimators.
struct EvaluationSet {
  Dataset samples;
  std::vector<double> bayes_values;
  std::vector<Point> inputs() const;
};

EvaluationSet make_evaluation_set(const SyntheticDistribution& dist, const DistanceBasedLoss& loss, std::size_t n_mc,
                                  std::uint64_t seed);

ExcessRiskEstimate excess_risk_from_predictions(std::span<const double> predictions, const EvaluationSet& eval,
                                                const DistanceBasedLoss& loss, double bayes_risk);

/// R(f) - R* with R* analytic; the excess itself is estimated from paired
/// loss differences against f*, which has far smaller variance.
ExcessRiskEstimate estimate_excess_risk(const Predictor& f, const SyntheticDistribution& dist,
                                        const DistanceBasedLoss& loss, std::size_t n_mc, std::uint64_t seed);

/// Checks ||f_i||_H <= sqrt(R_emp,i(0) / lambda_i) and
/// sup_grid |f_i| <= ||k_i||_inf ||f_i||_H for fitted local models.
struct NormAudit {
  std::size_t models_checked = 0;
  std::size_t violations = 0;
  double worst_norm_ratio = 0.0;
  double worst_sup_ratio = 0.0;
  std::vector<std::string> messages;

  void check(const LocalModel& model, const Dataset& region_data, const DistanceBasedLoss& loss,
             std::span<const Point> grid);
  void check(const LocalizedModel& model, const Assignment& assignment, std::span<const Point> grid);
  void merge(const NormAudit& other);
  [[nodiscard]] nlohmann::json to_json() const;
};

/// Relative slack for the audit, covering solver tolerances.
inline constexpr double kNormAuditSlack = 1e-8;

struct RegionRecipe {
  enum class Kind { whole, grid, voronoi, balls } kind = Kind::grid;
  std::optional<Box> bounds;  // grid bounds; defaults to the support
  std::vector<int> cells;
  /// Voronoi: m_n = fixed_m if set, else ceil(m_scale * n^m_exponent).
  std::optional<std::size_t> fixed_m;
  double m_scale = 1.0;
  double m_exponent = 0.25;
  /// Regionalization split size as a fraction of n.
  double split_fraction = 1.0;
  std::vector<Point> centers;
  double radius = 0.0;

  [[nodiscard]] std::size_t regions_for(std::size_t n) const;
  [[nodiscard]] bool n_dependent() const { return kind == Kind::voronoi; }
  [[nodiscard]] nlohmann::json to_json() const;
  static RegionRecipe from_json(const nlohmann::json& j);
};

/// Builds the regionalization used for sample size n. Voronoi recipes draw
/// their split from the regionalization stream, disjoint from training.
std::shared_ptr<const Regionalization> build_regionalization(const RegionRecipe& recipe,
                                                             const SyntheticDistribution& dist, std::size_t n,
                                                             std::uint64_t seed);

struct SweepConfig {
  SyntheticDistribution distribution = SyntheticDistribution::counterexample();
  DistanceBasedLoss loss = DistanceBasedLoss::least_squares();
  RegionRecipe regions;
  WeightKind weights = WeightKind::indicator;
  Bump bump = Bump::cone;
  double gamma = 1.0;
  LambdaSchedule schedule;
  std::vector<std::size_t> n_grid;
  std::vector<std::uint64_t> seeds;
  std::size_t n_mc = 20000;
  /// Exponent of the L_p distance; defaults to the loss's growth type.
  std::optional<double> p;
  GrowVariant variant = GrowVariant::lp;
  double p2_epsilon = kDefaultP2Epsilon;
  SolverOptions solver;
  std::size_t threads = 1;
  std::size_t audit_probes = 256;

  [[nodiscard]] double lp_exponent() const { return p.value_or(loss.growth_p()); }
  [[nodiscard]] nlohmann::json to_json() const;
  static SweepConfig from_json(const nlohmann::json& j);
};

struct SweepRow {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::size_t m_n = 0;
  std::size_t a_hat = 0;
  double lp_dist = 0.0;
  double lp_se = 0.0;
  double risk = 0.0;
  double bayes_risk = 0.0;
  double excess = 0.0;
  double excess_se = 0.0;
  double cond_shrink = 0.0;
  double cond_grow = 0.0;
  double wall_ms = 0.0;
};

struct SweepError {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::string message;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // sorted by (n, seed)
  std::vector<SweepError> errors;
  NormAudit audit;
};

/// Column order of the CSV output.
inline constexpr const char* kSweepCsvHeader =
    "n,seed,m_n,A_hat,lp_dist,lp_se,risk,bayes_risk,excess,cond_shrink,cond_grow,wall_ms";

SweepResult consistency_sweep(const SweepConfig& config);
/// One (n, seed) cell; throws on any stage error.
SweepRow sweep_cell(const SweepConfig& config, std::size_t n, std::uint64_t seed, const EvaluationSet& eval,
                    NormAudit* audit = nullptr);

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);
/// Shortest round-trip decimal representation, independent of locale.
std::string format_double(double v);

}  // namespace locsvm
