#include "locsvm/regionalize.hpp"
#include "locsvm/rng.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

using namespace locsvm;

namespace {

std::vector<Point> line(double lo, double hi, int count) {
  std::vector<Point> pts;
  for (int i = 0; i < count; ++i) pts.push_back(make_point({lo + (hi - lo) * i / (count - 1)}));
  return pts;
}

Dataset uniform_data(std::size_t n, const Box& box, std::uint64_t seed) {
  CounterRng rng(seed);
  Dataset data;
  for (std::size_t i = 0; i < n; ++i) {
    Point x(box.dim());
    for (int k = 0; k < box.dim(); ++k) x[k] = rng.uniform(box.lo[k], box.hi[k]);
    data.push_back({x, rng.normal()});
  }
  return data;
}

}  // namespace

TEST(GridPartition, ThreeCellsOnZeroNine) {
  const std::vector<int> cells = {3};
  const auto r = grid_partition(Box::interval(0, 9), cells);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_TRUE(r.is_partition());
  EXPECT_EQ(r.s_max_declared(), 1u);
  EXPECT_EQ(r.containing(make_point({0.0})), std::vector<std::size_t>{0});
  EXPECT_EQ(r.containing(make_point({2.999})), std::vector<std::size_t>{0});
  EXPECT_EQ(r.containing(make_point({3.0})), std::vector<std::size_t>{1});
  EXPECT_EQ(r.containing(make_point({6.0})), std::vector<std::size_t>{2});
  EXPECT_EQ(r.containing(make_point({9.0})), std::vector<std::size_t>{2});
  EXPECT_TRUE(r.containing(make_point({9.0001})).empty());
}

TEST(GridPartition, UnitSquareCornersInExactlyOneCell) {
  const std::vector<int> cells = {2, 2};
  const auto r = grid_partition(Box{make_point({0, 0}), make_point({1, 1})}, cells);
  ASSERT_EQ(r.size(), 4u);
  for (double a : {0.0, 0.5, 1.0}) {
    for (double b : {0.0, 0.5, 1.0}) EXPECT_EQ(r.containing(make_point({a, b})).size(), 1u) << a << "," << b;
  }
}

TEST(GridPartition, OneCellIsWholeBox) {
  const std::vector<int> cells = {1};
  const auto r = grid_partition(Box::interval(-1, 1), cells);
  ASSERT_EQ(r.size(), 1u);
  for (const auto& p : line(-1, 1, 21)) EXPECT_EQ(r.containing(p).size(), 1u);
}

TEST(GridPartition, Errors) {
  const std::vector<int> zero = {0};
  EXPECT_THROW(grid_partition(Box::interval(0, 1), zero), std::invalid_argument);
  const std::vector<int> one = {1};
  EXPECT_THROW(grid_partition(Box::interval(1, 1), one), std::invalid_argument);
}

TEST(VoronoiFromSplit, SingleCenterCoversEverything) {
  const auto split = line(0, 1, 10);
  const auto r = voronoi_from_split(split, 1, 3);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r.containing(make_point({-100.0})).size(), 1u);
  EXPECT_EQ(r.containing(make_point({77.0})).size(), 1u);
}

TEST(VoronoiFromSplit, MidpointBoundaryWithLowerIndexTies) {
  const std::vector<Point> split = {make_point({0.0}), make_point({10.0})};
  const auto r = voronoi_from_split(split, 2, 1);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_TRUE(r.is_partition());
  EXPECT_EQ(r.containing(make_point({4.999})), std::vector<std::size_t>{0});
  EXPECT_EQ(r.containing(make_point({5.001})), std::vector<std::size_t>{1});
  EXPECT_EQ(r.containing(make_point({5.0})), std::vector<std::size_t>{0});
  EXPECT_EQ(r.containing(make_point({-40.0})), std::vector<std::size_t>{0});
}

TEST(VoronoiFromSplit, RecoversWellSeparatedClusters) {
  // Oracle: with clusters this far apart every optimal 3-partition groups
  // by cluster, so the centers are the per-cluster means.
  std::vector<Point> split;
  const std::vector<std::array<double, 2>> means = {{{0, 0}}, {{10, 0}}, {{0, 10}}};
  CounterRng rng(4);
  std::vector<Point> oracle;
  for (const auto& m : means) {
    double sx = 0, sy = 0;
    for (int i = 0; i < 20; ++i) {
      const Point p = make_point({m[0] + rng.uniform(-0.5, 0.5), m[1] + rng.uniform(-0.5, 0.5)});
      sx += p[0];
      sy += p[1];
      split.push_back(p);
    }
    oracle.push_back(make_point({sx / 20, sy / 20}));
  }
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    const auto centers = kmeans_centers(split, 3, seed);
    ASSERT_EQ(centers.size(), 3u);
    for (const auto& o : oracle) {
      double best = INFINITY;
      for (const auto& c : centers) best = std::min(best, (c - o).norm());
      EXPECT_LT(best, 1e-9) << "seed " << seed;
    }
  }
}

TEST(VoronoiFromSplit, ErrorsAndDeterminism) {
  const auto split = line(0, 1, 5);
  EXPECT_THROW(voronoi_from_split(split, 6, 1), std::invalid_argument);
  const auto a = voronoi_from_split(split, 3, 9);
  const auto b = voronoi_from_split(split, 3, 9);
  EXPECT_EQ(a.to_json(), b.to_json());
}

TEST(VoronoiFromSplit, IndependentOfTrainingData) {
  // The construction takes only the split; permuting training data cannot
  // change it, and assign() only reads the finished cells.
  const Box box{make_point({0, 0}), make_point({1, 1})};
  const auto split = uniform_data(50, box, 8);
  std::vector<Point> xs;
  for (const auto& s : split) xs.push_back(s.x);
  const auto r = voronoi_from_split(xs, 4, 2, box);
  auto train = uniform_data(200, box, 99);
  const auto a1 = assign(train, r);
  std::reverse(train.begin(), train.end());
  const auto r2 = voronoi_from_split(xs, 4, 2, box);
  EXPECT_EQ(r.to_json(), r2.to_json());
  const auto a2 = assign(train, r2);
  EXPECT_EQ(a1.counts, a2.counts);
}

TEST(OverlappingCover, TwoBallsOnUnitInterval) {
  const std::vector<Point> centers = {make_point({0.0}), make_point({1.0})};
  const auto r = overlapping_cover(centers, 0.75, Box::interval(0, 1));
  EXPECT_FALSE(r.is_partition());
  EXPECT_EQ(r.s_max_declared(), 2u);
  EXPECT_EQ(r.containing(make_point({0.5})).size(), 2u);
  EXPECT_EQ(r.containing(make_point({0.1})).size(), 1u);
  EXPECT_EQ(r.containing(make_point({0.9})).size(), 1u);
}

TEST(OverlappingCover, SingleBall) {
  const std::vector<Point> centers = {make_point({0.5})};
  EXPECT_EQ(overlapping_cover(centers, 1.0, Box::interval(0, 1)).s_max_declared(), 1u);
}

TEST(OverlappingCover, ThreeBallsOverlapPairwiseOnly) {
  // Balls [-0.6,0.6], [0.4,1.6], [1.4,2.6]: overlaps (0.4,0.6) and (1.4,1.6)
  // involve two balls each, and no point lies in all three.
  const std::vector<Point> centers = {make_point({0.0}), make_point({1.0}), make_point({2.0})};
  const auto r = overlapping_cover(centers, 0.6, Box::interval(0, 2));
  EXPECT_EQ(r.s_max_declared(), 2u);
  EXPECT_EQ(r.containing(make_point({0.5})), (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(r.containing(make_point({1.5})), (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(r.containing(make_point({1.0})), std::vector<std::size_t>{1});
}

TEST(OverlappingCover, GapIsReported) {
  const std::vector<Point> centers = {make_point({0.0}), make_point({1.0})};
  try {
    (void)overlapping_cover(centers, 0.4, Box::interval(0, 1));
    FAIL() << "expected a coverage error";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("coverage gap"), std::string::npos) << e.what();
  }
}

TEST(OverlappingCover, RandomProbesNeverExceedSmax) {
  const Box box{make_point({0, 0}), make_point({1, 1})};
  std::vector<Point> centers;
  for (double a : {0.0, 0.5, 1.0}) {
    for (double b : {0.0, 0.5, 1.0}) centers.push_back(make_point({a, b}));
  }
  const auto r = overlapping_cover(centers, 0.4, box, 20000);
  CounterRng rng(12);
  std::vector<Point> probes;
  for (int i = 0; i < 100000; ++i) probes.push_back(make_point({rng.uniform(), rng.uniform()}));
  const auto rep = validate_regionalization(r, probes);
  EXPECT_TRUE(rep.r1_ok);
  EXPECT_TRUE(rep.r2_ok);
  EXPECT_LE(rep.observed_max_overlap, r.s_max_declared());
}

TEST(ValidateRegionalization, Examples) {
  const std::vector<int> cells = {3};
  const auto grid = grid_partition(Box::interval(0, 9), cells);
  const auto probes = probe_points(Box::interval(0, 9), 1000);
  const auto rg = validate_regionalization(grid, probes);
  EXPECT_TRUE(rg.r1_ok);
  EXPECT_TRUE(rg.r2_ok);
  EXPECT_TRUE(rg.partition_ok);
  EXPECT_EQ(rg.observed_max_overlap, 1u);
  EXPECT_EQ(rg.probe_count, probes.size());

  const std::vector<Point> centers = {make_point({0.0}), make_point({1.0})};
  const auto cover = overlapping_cover(centers, 0.75, Box::interval(0, 1));
  EXPECT_EQ(validate_regionalization(cover, probe_points(Box::interval(0, 1), 1000)).observed_max_overlap, 2u);

  const Regionalization holed({Region::interval(0, 1, false, 0), Region::interval(2, 3, true, 1)}, 1, true);
  const std::vector<Point> hole_probe = {make_point({0.5}), make_point({1.5})};
  const auto rh = validate_regionalization(holed, hole_probe);
  EXPECT_FALSE(rh.r1_ok);
  ASSERT_TRUE(rh.first_uncovered.has_value());
  EXPECT_EQ((*rh.first_uncovered)[0], 1.5);
  EXPECT_THROW(validate_regionalization(holed, std::vector<Point>{}), std::invalid_argument);
}

TEST(ValidateRegionalization, UnderstatedSmaxFails) {
  const std::vector<Point> centers = {make_point({0.0}), make_point({1.0})};
  const auto cover = overlapping_cover(centers, 0.75, Box::interval(0, 1));
  const Regionalization lying(cover.regions(), 1, false, cover.domain());
  EXPECT_FALSE(validate_regionalization(lying, probe_points(Box::interval(0, 1), 1000)).r2_ok);
}

TEST(ProbePoints, CountAndCorners) {
  const Box box{make_point({0, -1}), make_point({2, 1})};
  const auto p = probe_points(box, 100);
  EXPECT_EQ(p.size(), 104u);
  for (const auto& x : p) EXPECT_TRUE(box.contains(x));
}

TEST(Assign, Examples) {
  const std::vector<int> cells = {3};
  const auto grid = grid_partition(Box::interval(0, 9), cells);
  const Dataset data = {{make_point({1.0}), 0.1}, {make_point({4.0}), 0.2}, {make_point({8.0}), 0.3}};
  const auto a = assign(data, grid);
  EXPECT_EQ(a.counts, (std::vector<std::size_t>{1, 1, 1}));
  EXPECT_EQ(a.a_hat, 3u);

  const std::vector<Point> centers = {make_point({0.0}), make_point({1.0})};
  const auto cover = overlapping_cover(centers, 0.75, Box::interval(0, 1));
  const auto b = assign({{make_point({0.5}), 1.0}}, cover);
  EXPECT_EQ(b.counts, (std::vector<std::size_t>{1, 1}));
  EXPECT_EQ(b.per_region_data[0].front().y, 1.0);
  EXPECT_EQ(b.per_region_data[1].front().y, 1.0);

  const auto c = assign({}, grid);
  EXPECT_EQ(c.counts, (std::vector<std::size_t>{0, 0, 0}));
  EXPECT_EQ(c.a_hat, 0u);
  EXPECT_TRUE(c.nonempty_indices.empty());

  EXPECT_THROW(assign({{make_point({10.0}), 0.0}}, grid), std::invalid_argument);
}

TEST(Assign, PartitionPlacesEverySampleOnce) {
  const Box box{make_point({0, 0}), make_point({1, 1})};
  const std::vector<int> cells = {3, 4};
  const auto grid = grid_partition(box, cells);
  auto data = uniform_data(2000, box, 31);
  data.push_back({make_point({1.0 / 3.0, 0.25}), 0.0});
  data.push_back({make_point({1.0, 1.0}), 0.0});
  const auto a = assign(data, grid);
  EXPECT_EQ(std::accumulate(a.counts.begin(), a.counts.end(), std::size_t{0}), data.size());
  std::vector<int> seen(data.size(), 0);
  for (const auto& idx : a.per_region_indices) {
    EXPECT_TRUE(std::is_sorted(idx.begin(), idx.end()));
    for (auto i : idx) ++seen[i];
  }
  EXPECT_TRUE(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));
  const auto again = assign(data, grid);
  EXPECT_EQ(again.per_region_indices, a.per_region_indices);
}

TEST(Assign, CoverDuplicatesOverlappingSamples) {
  const std::vector<Point> centers = {make_point({0.0}), make_point({1.0})};
  const auto cover = overlapping_cover(centers, 0.75, Box::interval(0, 1));
  const auto data = uniform_data(500, Box::interval(0, 1), 2);
  const auto a = assign(data, cover);
  EXPECT_GT(a.counts[0] + a.counts[1], data.size());
}

TEST(RegionalizationJson, RoundTrip) {
  const std::vector<int> cells = {3};
  const auto grid = grid_partition(Box::interval(0, 9), cells);
  const auto back = Regionalization::from_json(grid.to_json());
  EXPECT_EQ(back.size(), 3u);
  EXPECT_EQ(back.containing(make_point({3.0})), std::vector<std::size_t>{1});

  const auto doc = nlohmann::json::parse(R"({"type":"grid","bounds":[[0,9]],"cells":[3]})");
  EXPECT_EQ(Regionalization::from_json(doc).containing(make_point({9.0})), std::vector<std::size_t>{2});

  const auto split = line(0, 1, 30);
  const auto v = voronoi_from_split(split, 3, 4, Box::interval(0, 1));
  const auto vb = Regionalization::from_json(v.to_json());
  for (const auto& p : line(0, 1, 101)) EXPECT_EQ(vb.containing(p), v.containing(p));
}
