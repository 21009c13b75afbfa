#include "locsvm/config.hpp"
#include "locsvm/experiments.hpp"
#include "locsvm/localized.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace locsvm;

namespace {

LocalizedModel roundtrip(const LocalizedModel& m) {
  return LocalizedModel::from_json(nlohmann::json::parse(m.to_json().dump()));
}

std::vector<Point> line(double lo, double hi, int count) {
  std::vector<Point> pts;
  for (int i = 0; i < count; ++i) pts.push_back(make_point({lo + (hi - lo) * i / (count - 1)}));
  return pts;
}

}  // namespace

TEST(ModelJson, GridModelPredictsIdenticallyAfterRoundTrip) {
  const auto d = SyntheticDistribution::gaussian_noise(Box::interval(0, 9), Target::sine(1.0, 1.0), 0.2);
  const std::vector<int> cells = {3};
  const auto r = std::make_shared<const Regionalization>(grid_partition(Box::interval(0, 9), cells));
  const std::vector<double> gammas = {0.5, 1.0};
  KernelAssignment k({KernelFamily::gaussian(gammas, 1)}, 3);
  k.set(0, 0, 0);
  k.set(1, 0, 1);
  k.set(2, 0, 0);
  const std::vector<double> lambdas = {0.01, 0.02, 0.03};
  for (const auto& loss : {DistanceBasedLoss::least_squares(), DistanceBasedLoss::pinball(0.7)}) {
    const auto m = fit_localized(d.sample(120, 2), r, lambdas, k, loss, indicator_weights(r));
    const auto back = roundtrip(m);
    for (const auto& x : line(0, 9, 181)) EXPECT_EQ(predict(back, x), predict(m, x));
    EXPECT_EQ(back.lambdas(), m.lambdas());
    EXPECT_EQ(back.betas(), m.betas());
    EXPECT_EQ(back.loss().kind(), loss.kind());
  }
}

TEST(ModelJson, CoverAndVoronoiModels) {
  const auto d = SyntheticDistribution::gaussian_noise(Box::interval(0, 1), Target::sine(1.0, 6.0), 0.1);
  const auto data = d.sample(80, 4);
  const std::vector<Point> centers = {make_point({0.0}), make_point({0.5}), make_point({1.0})};
  const auto cover = std::make_shared<const Regionalization>(overlapping_cover(centers, 0.3, Box::interval(0, 1)));
  const std::vector<double> l3(3, 0.01);
  const auto m1 = fit_localized(data, cover, l3, KernelAssignment::uniform(Kernel::gaussian(0.3, 1), 3),
                                DistanceBasedLoss::least_squares(), normalized_membership_weights(cover, Bump::plateau));
  const auto b1 = roundtrip(m1);
  for (const auto& x : line(0, 1, 101)) EXPECT_EQ(predict(b1, x), predict(m1, x));
  EXPECT_EQ(b1.weights().bump(), Bump::plateau);

  const auto split = d.sample_inputs(40, 77, Stream::regionalization_split);
  const auto vor = std::make_shared<const Regionalization>(voronoi_from_split(split, 4, 1, Box::interval(0, 1)));
  const std::vector<double> l4(4, 0.01);
  const auto m2 = fit_localized(data, vor, l4, KernelAssignment::uniform(Kernel::gaussian(0.3, 1), 4),
                                DistanceBasedLoss::epsilon_insensitive(0.05), indicator_weights(vor));
  const auto b2 = roundtrip(m2);
  for (const auto& x : line(0, 1, 101)) EXPECT_EQ(predict(b2, x), predict(m2, x));
}

TEST(ModelJson, ZeroModelsSurvive) {
  const std::vector<int> cells = {3};
  const auto r = std::make_shared<const Regionalization>(grid_partition(Box::interval(0, 9), cells));
  const Dataset data = {{make_point({4.0}), 1.0}};
  const std::vector<double> lambdas(3, 0.1);
  const auto m = fit_localized(data, r, lambdas, KernelAssignment::uniform(Kernel::gaussian(1.0, 1), 3),
                               DistanceBasedLoss::least_squares(), indicator_weights(r));
  const auto j = m.to_json();
  EXPECT_TRUE(j.at("local_models")[0].at("zero").get<bool>());
  EXPECT_FALSE(j.at("local_models")[1].at("zero").get<bool>());
  const auto back = roundtrip(m);
  EXPECT_TRUE(back.local_model(2).is_zero_model());
  EXPECT_EQ(predict(back, make_point({4.0})), predict(m, make_point({4.0})));
}

TEST(ModelJson, RejectsForeignOrFutureDocuments) {
  const auto m = fit_global({{make_point({0.0}), 1.0}}, Kernel::gaussian(1.0, 1), 1.0,
                            DistanceBasedLoss::least_squares());
  auto j = m.to_json();
  EXPECT_EQ(j.at("format"), "locsvm-model");
  EXPECT_EQ(j.at("version"), LocalizedModel::kFormatVersion);
  j["version"] = LocalizedModel::kFormatVersion + 1;
  EXPECT_THROW(LocalizedModel::from_json(j), std::invalid_argument);
  EXPECT_THROW(LocalizedModel::from_json(nlohmann::json{{"format", "other"}}), std::invalid_argument);
}

TEST(CsvInput, DatasetWithAndWithoutHeader) {
  std::istringstream with("x1,x2,y\n0.5,1.5,2.0\n-1,2,3e-1\n");
  const auto a = read_dataset_csv(with);
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[0].x, make_point({0.5, 1.5}));
  EXPECT_EQ(a[1].y, 0.3);
  std::istringstream without("1,2\n3,4\n");
  const auto b = read_dataset_csv(without);
  ASSERT_EQ(b.size(), 2u);
  EXPECT_EQ(b[1].x, make_point({3.0}));
  std::istringstream ragged("1,2\n3,4,5\n");
  EXPECT_THROW(read_dataset_csv(ragged), std::invalid_argument);
  std::istringstream pts("x\n0.25\n0.75\n");
  EXPECT_EQ(read_points_csv(pts).size(), 2u);
}

TEST(FitConfig, SyntheticDataAndSchedule) {
  const auto j = nlohmann::json::parse(R"({
    "data": {"distribution": {"type": "gaussian_noise", "support": [[0, 6]],
                              "target": {"type": "sine", "amplitude": 1, "angular": 1}, "sigma": 0.2},
             "n": 90, "seed": 4},
    "loss": {"loss": "least_squares"},
    "regionalization": {"type": "grid", "cells": [3]},
    "kernel": {"gamma": 0.8},
    "schedule": {"a": 0.5, "b": 0.2, "C": 1, "n_eff": "global"}
  })");
  const auto setup = fit_setup_from_json(j, ".");
  EXPECT_EQ(setup.data.size(), 90u);
  EXPECT_EQ(setup.regionalization->size(), 3u);
  ASSERT_EQ(setup.lambdas.size(), 3u);
  EXPECT_DOUBLE_EQ(setup.lambdas[0], 0.5 * std::pow(90.0, -0.2));
  const auto m = run_fit(setup);
  const auto again = run_fit(fit_setup_from_json(j, "."));
  EXPECT_EQ(predict(m, make_point({2.0})), predict(again, make_point({2.0})));
  const auto other = fit_setup_from_json(j, ".", 5);
  EXPECT_NE(other.data[0].y, setup.data[0].y);
}

TEST(SweepConfigJson, SeedOverride) {
  const auto j = nlohmann::json::parse(R"({
    "distribution": {"type": "counterexample"},
    "loss": {"loss": "pinball", "tau": 0.5},
    "regionalization": {"type": "voronoi", "m": 2},
    "kernel": {"gamma": 0.3},
    "schedule": {"a": 0.1, "b": 0.2, "C": 1, "n_eff": "global"},
    "n_grid": [64, 128], "seeds": [1, 2, 3]
  })");
  EXPECT_EQ(sweep_config_from_json(j).seeds.size(), 3u);
  EXPECT_EQ(sweep_config_from_json(j, 9).seeds, std::vector<std::uint64_t>{9});
  const auto c = SweepConfig::from_json(j);
  const auto back = SweepConfig::from_json(c.to_json());
  EXPECT_EQ(back.n_grid, c.n_grid);
  EXPECT_EQ(back.loss.tau(), 0.5);
  EXPECT_EQ(back.regions.fixed_m, std::optional<std::size_t>{2});
}
