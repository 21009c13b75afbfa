#include "locsvm/config.hpp"
#include "locsvm/experiments.hpp"
#include "locsvm/figure1.hpp"
#include "locsvm/localized.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace locsvm;

namespace {

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

std::optional<std::uint64_t> seed_of(const CLI::Option* opt, std::uint64_t value) {
  if (opt->count() == 0) return std::nullopt;
  return value;
}

int cmd_fit(const std::string& config, const std::string& out_path, std::optional<std::uint64_t> seed) {
  const auto j = load_json_file(config);
  const FitSetup setup = fit_setup_from_json(j, fs::path(config).parent_path(), seed);
  const LocalizedModel model = run_fit(setup);
  auto out = open_output(out_path);
  out << model.to_json().dump(1) << '\n';
  std::size_t zero = 0;
  for (const auto& m : model.local_models()) zero += m.is_zero_model() ? 1 : 0;
  std::cerr << "fitted " << model.local_models().size() << " regions (" << zero << " empty) on "
            << setup.data.size() << " samples -> " << out_path << '\n';
  return 0;
}

int cmd_predict(const std::string& model_path, const std::string& points_path, const std::string& out_path) {
  const LocalizedModel model = LocalizedModel::from_json(load_json_file(model_path));
  std::ifstream in(points_path);
  if (!in) throw std::runtime_error("cannot open " + points_path);
  const auto points = read_points_csv(in);
  std::ofstream file;
  if (!out_path.empty()) file = open_output(out_path);
  std::ostream& out = out_path.empty() ? std::cout : file;
  const int d = model.regionalization().dim();
  for (int k = 0; k < d; ++k) out << 'x' << (k + 1) << ',';
  out << "prediction\n";
  for (const auto& x : points) {
    if (x.size() != d) throw std::invalid_argument("point dimension does not match the model");
    for (int k = 0; k < d; ++k) out << format_double(x[k]) << ',';
    out << format_double(model(x)) << '\n';
  }
  return 0;
}

int cmd_validate(const std::string& config, std::optional<std::uint64_t> seed, bool json_only) {
  const auto j = load_json_file(config);
  const auto res = validate_config(j, fs::path(config).parent_path(), seed);
  std::cout << res.report.dump(1) << '\n';
  if (!json_only) std::cout << res.table;
  return res.ok ? 0 : 3;
}

int cmd_sweep(const std::string& config, const std::string& out_path, std::optional<std::uint64_t> seed) {
  const SweepConfig c = sweep_config_from_json(load_json_file(config), seed);
  const SweepResult res = consistency_sweep(c);
  auto out = open_output(out_path);
  write_sweep_csv(out, res.rows);
  for (const auto& e : res.errors) std::cerr << "error n=" << e.n << " seed=" << e.seed << ": " << e.message << '\n';
  std::cerr << res.rows.size() << " rows -> " << out_path << "; norm audit " << res.audit.to_json().dump() << '\n';
  return res.errors.empty() ? 0 : 4;
}

int cmd_figure1(const std::string& config, const std::string& out_path, std::optional<std::uint64_t> seed) {
  Figure1Config c;
  if (!config.empty()) c = Figure1Config::from_json(load_json_file(config));
  if (seed) c.seed = *seed;
  Figure1Curves curves;
  const Figure1Record rec = figure1_experiment(c, &curves);
  auto out = open_output(out_path);
  out << "x,target,global,localized\n";
  for (std::size_t k = 0; k < curves.x.size(); ++k) {
    out << format_double(curves.x[k]) << ',' << format_double(curves.target[k]) << ','
        << format_double(curves.global[k]) << ',' << format_double(curves.localized[k]) << '\n';
  }
  std::cout << rec.to_json().dump() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Localized kernel SVMs: fitting, validation and consistency experiments"};
  app.require_subcommand(1);
  std::uint64_t seed_value = 0;

  auto* fit = app.add_subcommand("fit", "Fit a localized SVM and write the model as JSON");
  std::string fit_config, fit_out;
  fit->add_option("config", fit_config, "Fit config (JSON)")->required()->check(CLI::ExistingFile);
  fit->add_option("-o,--output", fit_out, "Model output path")->required();
  auto* fit_seed = fit->add_option("--seed", seed_value, "Override the data seed");

  auto* predict = app.add_subcommand("predict", "Predict at points from a CSV file");
  std::string model_path, points_path, predict_out;
  predict->add_option("model", model_path, "Model JSON")->required()->check(CLI::ExistingFile);
  predict->add_option("points", points_path, "Points CSV")->required()->check(CLI::ExistingFile);
  predict->add_option("-o,--output", predict_out, "Output CSV (default stdout)");

  auto* validate = app.add_subcommand("validate", "Check regionalization, weights and schedule conditions");
  std::string validate_config_path;
  bool json_only = false;
  validate->add_option("config", validate_config_path, "Fit or sweep config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  validate->add_flag("--json", json_only, "Print only the JSON report");
  auto* validate_seed = validate->add_option("--seed", seed_value, "Override the seed");

  auto* sweep = app.add_subcommand("sweep", "Run a consistency sweep and write CSV rows");
  std::string sweep_config, sweep_out;
  sweep->add_option("config", sweep_config, "Sweep config (JSON)")->required()->check(CLI::ExistingFile);
  sweep->add_option("-o,--output", sweep_out, "Results CSV")->required();
  auto* sweep_seed = sweep->add_option("--seed", seed_value, "Run only this seed");

  auto* fig = app.add_subcommand("figure1", "Global vs. localized SVM on the piecewise target");
  std::string fig_config, fig_out;
  fig->add_option("--config", fig_config, "Figure config (JSON)")->check(CLI::ExistingFile);
  fig->add_option("-o,--output", fig_out, "Curve CSV")->required();
  auto* fig_seed = fig->add_option("--seed", seed_value, "Override the seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*fit) return cmd_fit(fit_config, fit_out, seed_of(fit_seed, seed_value));
    if (*predict) return cmd_predict(model_path, points_path, predict_out);
    if (*validate) return cmd_validate(validate_config_path, seed_of(validate_seed, seed_value), json_only);
    if (*sweep) return cmd_sweep(sweep_config, sweep_out, seed_of(sweep_seed, seed_value));
    if (*fig) return cmd_figure1(fig_config, fig_out, seed_of(fig_seed, seed_value));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
