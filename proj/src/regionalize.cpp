#include "locsvm/regionalize.hpp"

#include "locsvm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace locsvm {

Regionalization::Regionalization(std::vector<Region> regions, std::size_t s_max_declared, bool is_partition,
                                 std::optional<Box> domain, Provenance provenance)
    : regions_(std::move(regions)),
      s_max_(s_max_declared),
      is_partition_(is_partition),
      domain_(std::move(domain)),
      provenance_(provenance) {
  if (regions_.empty()) throw std::invalid_argument("Regionalization: no regions");
  if (s_max_ == 0) throw std::invalid_argument("Regionalization: s_max must be positive");
  const int d = regions_.front().dim();
  for (std::size_t i = 0; i < regions_.size(); ++i) {
    if (regions_[i].dim() != d) throw std::invalid_argument("Regionalization: regions differ in dimension");
    if (regions_[i].index() != i) throw std::invalid_argument("Regionalization: region indices must be 0..m-1 in order");
  }
  std::shared_ptr<const std::vector<Point>> common;
  bool all_voronoi = true;
  for (const auto& r : regions_) {
    const auto* v = std::get_if<VoronoiShape>(&r.shape());
    if (!v || (common && v->centers != common) || v->center != r.index()) {
      all_voronoi = false;
      break;
    }
    common = v->centers;
  }
  if (all_voronoi && common && common->size() == regions_.size()) voronoi_ = common;
}

std::vector<std::size_t> Regionalization::containing(const Point& x) const {
  if (voronoi_) {
    if (x.size() != dim()) return {};
    if (domain_ && !domain_->contains(x)) return {};
    return {nearest_center(*voronoi_, x)};
  }
  std::vector<std::size_t> out;
  for (const auto& r : regions_) {
    if (r.contains(x)) out.push_back(r.index());
  }
  return out;
}

nlohmann::json Regionalization::to_json() const {
  nlohmann::json j;
  j["s_max"] = s_max_;
  j["is_partition"] = is_partition_;
  if (domain_) j["domain"] = box_to_json(*domain_);
  j["provenance"] = provenance_.kind == Provenance::Kind::fixed ? "fixed" : "built_from_split";
  j["seed"] = provenance_.seed;
  if (voronoi_) {
    j["type"] = "voronoi";
    j["centers"] = nlohmann::json::array();
    for (const auto& c : *voronoi_) j["centers"].push_back(point_to_json(c));
    return j;
  }
  j["type"] = "regions";
  j["regions"] = nlohmann::json::array();
  for (const auto& r : regions_) j["regions"].push_back(r.to_json());
  return j;
}

namespace {

std::vector<Point> points_from_json(const nlohmann::json& j) {
  std::vector<Point> pts;
  for (const auto& p : j) pts.push_back(point_from_json(p));
  return pts;
}

Provenance provenance_from_json(const nlohmann::json& j) {
  Provenance p;
  if (j.value("provenance", std::string("fixed")) == "built_from_split") p.kind = Provenance::Kind::built_from_split;
  p.seed = j.value("seed", std::uint64_t{0});
  return p;
}

}  // namespace

Regionalization Regionalization::from_json(const nlohmann::json& j) {
  const auto type = j.at("type").get<std::string>();
  std::optional<Box> domain;
  if (j.contains("domain")) domain = box_from_json(j.at("domain"));
  if (type == "grid") {
    const Box bounds = box_from_json(j.at("bounds"));
    const auto cells = j.at("cells").get<std::vector<int>>();
    return grid_partition(bounds, cells);
  }
  if (type == "balls") {
    const auto centers = points_from_json(j.at("centers"));
    const Box dom = domain ? *domain : box_from_json(j.at("bounds"));
    return overlapping_cover(centers, j.at("radius").get<double>(), dom, j.value("probes", kDefaultProbeCount));
  }
  if (type == "voronoi") {
    auto centers = std::make_shared<const std::vector<Point>>(points_from_json(j.at("centers")));
    std::vector<Region> regions;
    for (std::size_t c = 0; c < centers->size(); ++c) regions.push_back(Region::voronoi_cell(centers, c, domain, c));
    return Regionalization(std::move(regions), 1, true, domain, provenance_from_json(j));
  }
  if (type == "regions") {
    std::vector<Region> regions;
    for (const auto& rj : j.at("regions")) {
      const auto shape = rj.at("shape").get<std::string>();
      const auto idx = rj.at("index").get<std::size_t>();
      if (shape == "box") {
        regions.push_back(Region::box(box_from_json(rj.at("bounds")), rj.at("closed_upper").get<std::vector<bool>>(), idx));
      } else if (shape == "ball") {
        std::optional<Box> d;
        if (rj.contains("domain")) d = box_from_json(rj.at("domain"));
        regions.push_back(Region::ball(point_from_json(rj.at("center")), rj.at("radius").get<double>(), d, idx));
      } else if (shape == "whole") {
        regions.push_back(Region::whole(rj.at("dim").get<int>(), idx));
      } else {
        throw std::invalid_argument("unsupported region shape in JSON: " + shape);
      }
    }
    return Regionalization(std::move(regions), j.at("s_max").get<std::size_t>(), j.at("is_partition").get<bool>(),
                           domain, provenance_from_json(j));
  }
  throw std::invalid_argument("unknown regionalization type: " + type);
}

Regionalization grid_partition(const Box& bounds, std::span<const int> cells_per_dim) {
  if (!bounds.nondegenerate()) throw std::invalid_argument("grid_partition: degenerate bounds");
  const int d = bounds.dim();
  if (static_cast<int>(cells_per_dim.size()) != d) throw std::invalid_argument("grid_partition: cells_per_dim has wrong length");
  for (int c : cells_per_dim) {
    if (c <= 0) throw std::invalid_argument("grid_partition: every axis needs at least one cell");
  }
  // Shared edge coordinates make neighbouring cells agree exactly on faces.
  std::vector<std::vector<double>> edges(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) {
    const int c = cells_per_dim[static_cast<std::size_t>(k)];
    auto& e = edges[static_cast<std::size_t>(k)];
    for (int t = 0; t <= c; ++t) e.push_back(bounds.lo[k] + (bounds.hi[k] - bounds.lo[k]) * t / c);
    e.back() = bounds.hi[k];
  }
  std::size_t total = 1;
  for (int c : cells_per_dim) total *= static_cast<std::size_t>(c);

  std::vector<Region> regions;
  regions.reserve(total);
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  for (std::size_t cell = 0; cell < total; ++cell) {
    // Axis 0 varies slowest.
    std::size_t rem = cell;
    for (int k = d - 1; k >= 0; --k) {
      const auto c = static_cast<std::size_t>(cells_per_dim[static_cast<std::size_t>(k)]);
      idx[static_cast<std::size_t>(k)] = static_cast<int>(rem % c);
      rem /= c;
    }
    Box b{Point(d), Point(d)};
    std::vector<bool> closed(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) {
      const auto uk = static_cast<std::size_t>(k);
      b.lo[k] = edges[uk][static_cast<std::size_t>(idx[uk])];
      b.hi[k] = edges[uk][static_cast<std::size_t>(idx[uk] + 1)];
      closed[uk] = idx[uk] + 1 == cells_per_dim[uk];
    }
    regions.push_back(Region::box(std::move(b), std::move(closed), cell));
  }
  return Regionalization(std::move(regions), 1, true, bounds);
}

std::vector<Point> kmeans_centers(std::span<const Point> points, std::size_t m, std::uint64_t seed,
                                  int max_iterations) {
  if (m == 0) throw std::invalid_argument("kmeans: m must be positive");
  if (m > points.size()) throw std::invalid_argument("kmeans: more centers requested than split points");
  CounterRng rng(CounterRng::derive(seed, static_cast<std::uint64_t>(Stream::kmeans_init)));
  const std::size_t n = points.size();

  // k-means++ seeding.
  std::vector<Point> centers;
  centers.push_back(points[rng.below(n)]);
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  while (centers.size() < m) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], (points[i] - centers.back()).squaredNorm());
      total += d2[i];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      const double u = rng.uniform() * total;
      double acc = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc > u && d2[i] > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = rng.below(n);
    }
    centers.push_back(points[pick]);
  }

  std::vector<std::size_t> label(n, m);
  for (int it = 0; it < max_iterations; ++it) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = nearest_center(centers, points[i]);
      if (c != label[i]) {
        label[i] = c;
        changed = true;
      }
    }
    if (!changed) break;
    std::vector<Point> sums(m, Point::Zero(points[0].size()));
    std::vector<std::size_t> counts(m, 0);
    for (std::size_t i = 0; i < n; ++i) {
      sums[label[i]] += points[i];
      ++counts[label[i]];
    }
    for (std::size_t c = 0; c < m; ++c) {
      if (counts[c] > 0) {
        centers[c] = sums[c] / static_cast<double>(counts[c]);
        continue;
      }
      // Empty cluster: move it to the point farthest from its center.
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double dd = (points[i] - centers[label[i]]).squaredNorm();
        if (dd > far_d) {
          far_d = dd;
          far = i;
        }
      }
      centers[c] = points[far];
    }
  }
  std::sort(centers.begin(), centers.end(), [](const Point& a, const Point& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  });
  return centers;
}

Regionalization voronoi_from_split(std::span<const Point> split, std::size_t m, std::uint64_t seed,
                                   std::optional<Box> domain, int max_iterations) {
  if (m > split.size()) throw std::invalid_argument("voronoi_from_split: m exceeds the split size");
  auto centers = std::make_shared<const std::vector<Point>>(kmeans_centers(split, m, seed, max_iterations));
  std::vector<Region> regions;
  regions.reserve(m);
  for (std::size_t c = 0; c < m; ++c) regions.push_back(Region::voronoi_cell(centers, c, domain, c));
  return Regionalization(std::move(regions), 1, true, domain, Provenance{Provenance::Kind::built_from_split, seed});
}

namespace {

double radical_inverse(std::size_t index, unsigned base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

}  // namespace

std::vector<Point> probe_points(const Box& box, std::size_t count) {
  const int d = box.dim();
  if (d > static_cast<int>(std::size(kPrimes))) throw std::invalid_argument("probe_points: dimension too large");
  std::vector<Point> pts;
  pts.reserve(count + (std::size_t{1} << d));
  for (std::size_t i = 1; i <= count; ++i) {
    Point p(d);
    for (int k = 0; k < d; ++k) {
      p[k] = box.lo[k] + (box.hi[k] - box.lo[k]) * radical_inverse(i, kPrimes[k]);
    }
    pts.push_back(std::move(p));
  }
  for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
    Point p(d);
    for (int k = 0; k < d; ++k) p[k] = (mask >> k) & 1U ? box.hi[k] : box.lo[k];
    pts.push_back(std::move(p));
  }
  return pts;
}

Regionalization overlapping_cover(std::span<const Point> centers, double radius, const Box& domain,
                                  std::size_t probe_count) {
  if (centers.empty()) throw std::invalid_argument("overlapping_cover: no centers");
  if (!(radius > 0.0)) throw std::invalid_argument("overlapping_cover: radius must be positive");
  std::vector<Region> regions;
  for (std::size_t i = 0; i < centers.size(); ++i) regions.push_back(Region::ball(centers[i], radius, domain, i));

  std::size_t s_max = 0;
  for (const auto& probe : probe_points(domain, probe_count)) {
    std::size_t count = 0;
    for (const auto& r : regions) count += r.contains(probe) ? 1 : 0;
    if (count == 0) {
      std::ostringstream msg;
      msg << "overlapping_cover: coverage gap at probe point (";
      for (Eigen::Index k = 0; k < probe.size(); ++k) msg << (k ? ", " : "") << probe[k];
      msg << ")";
      throw std::invalid_argument(msg.str());
    }
    s_max = std::max(s_max, count);
  }
  const bool partition = regions.size() == 1;
  return Regionalization(std::move(regions), s_max, partition, domain);
}

nlohmann::json RegionalizationReport::to_json() const {
  nlohmann::json j{{"r1_ok", r1_ok},
                   {"r2_ok", r2_ok},
                   {"partition_ok", partition_ok},
                   {"observed_max_overlap", observed_max_overlap},
                   {"probe_count", probe_count}};
  if (first_uncovered) j["first_uncovered"] = point_to_json(*first_uncovered);
  return j;
}

RegionalizationReport validate_regionalization(const Regionalization& r, std::span<const Point> probes) {
  if (probes.empty()) throw std::invalid_argument("validate_regionalization: no probes");
  RegionalizationReport rep;
  rep.probe_count = probes.size();
  rep.r1_ok = true;
  bool exactly_one = true;
  for (const auto& p : probes) {
    const std::size_t c = r.containing(p).size();
    if (c == 0) {
      if (rep.r1_ok) rep.first_uncovered = p;
      rep.r1_ok = false;
    }
    exactly_one = exactly_one && c == 1;
    rep.observed_max_overlap = std::max(rep.observed_max_overlap, c);
  }
  rep.r2_ok = rep.observed_max_overlap <= r.s_max_declared();
  rep.partition_ok = !r.is_partition() || exactly_one;
  return rep;
}

Assignment assign(const Dataset& data, const Regionalization& r) {
  Assignment a;
  const std::size_t m = r.size();
  a.per_region_data.resize(m);
  a.per_region_indices.resize(m);
  a.counts.assign(m, 0);
  for (std::size_t s = 0; s < data.size(); ++s) {
    const auto regions = r.containing(data[s].x);
    if (regions.empty()) {
      std::ostringstream msg;
      msg << "assign: sample " << s << " lies in no region";
      throw std::invalid_argument(msg.str());
    }
    for (std::size_t i : regions) {
      a.per_region_data[i].push_back(data[s]);
      a.per_region_indices[i].push_back(s);
      ++a.counts[i];
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (a.counts[i] > 0) a.nonempty_indices.push_back(i);
  }
  a.a_hat = a.nonempty_indices.size();
  return a;
}

}  // namespace locsvm
