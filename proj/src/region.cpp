#include "locsvm/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace locsvm {

bool Box::contains(const Point& x) const {
  if (x.size() != lo.size()) return false;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    if (!(x[k] >= lo[k] && x[k] <= hi[k])) return false;
  }
  return true;
}

double Box::volume() const { return (hi - lo).prod(); }

bool Box::nondegenerate() const {
  if (lo.size() == 0 || lo.size() != hi.size()) return false;
  for (Eigen::Index k = 0; k < lo.size(); ++k) {
    if (!std::isfinite(lo[k]) || !std::isfinite(hi[k]) || !(hi[k] > lo[k])) return false;
  }
  return true;
}

Box Box::intersect(const Box& other) const {
  return Box{lo.cwiseMax(other.lo), hi.cwiseMin(other.hi)};
}

Box Box::interval(double lo, double hi) { return Box{make_point({lo}), make_point({hi})}; }

Point make_point(std::initializer_list<double> values) {
  Point p(static_cast<Eigen::Index>(values.size()));
  Eigen::Index k = 0;
  for (double v : values) p[k++] = v;
  return p;
}

std::size_t nearest_center(const std::vector<Point>& centers, const Point& x) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centers.size(); ++c) {
    const double d = (centers[c] - x).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

Region::Region(RegionShape shape, std::size_t index) : shape_(std::move(shape)), index_(index) {}

Region Region::interval(double lo, double hi, bool closed_hi, std::size_t index) {
  return box(Box::interval(lo, hi), {closed_hi}, index);
}

Region Region::box(Box b, std::vector<bool> closed_upper, std::size_t index) {
  if (static_cast<int>(closed_upper.size()) != b.dim()) {
    throw std::invalid_argument("Region::box: closed_upper has wrong length");
  }
  return Region(BoxShape{std::move(b), std::move(closed_upper)}, index);
}

Region Region::ball(Point center, double radius, std::optional<Box> domain, std::size_t index) {
  if (!(radius > 0.0)) throw std::invalid_argument("Region::ball: radius must be positive");
  return Region(BallShape{std::move(center), radius, std::move(domain)}, index);
}

Region Region::voronoi_cell(std::shared_ptr<const std::vector<Point>> centers, std::size_t center,
                            std::optional<Box> domain, std::size_t index) {
  if (!centers || center >= centers->size()) {
    throw std::invalid_argument("Region::voronoi_cell: center index out of range");
  }
  return Region(VoronoiShape{std::move(centers), center, std::move(domain)}, index);
}

Region Region::whole(int dim, std::size_t index) { return Region(WholeSpaceShape{dim}, index); }

int Region::dim() const {
  return std::visit(
      [](const auto& s) -> int {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, BoxShape>) return s.box.dim();
        else if constexpr (std::is_same_v<T, BallShape>) return static_cast<int>(s.center.size());
        else if constexpr (std::is_same_v<T, VoronoiShape>) return static_cast<int>((*s.centers)[0].size());
        else return s.dim;
      },
      shape_);
}

bool Region::contains(const Point& x) const {
  if (x.size() != dim()) return false;
  return std::visit(
      [&](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, BoxShape>) {
          for (Eigen::Index k = 0; k < x.size(); ++k) {
            if (!(x[k] >= s.box.lo[k])) return false;
            if (s.closed_upper[static_cast<std::size_t>(k)] ? !(x[k] <= s.box.hi[k]) : !(x[k] < s.box.hi[k])) {
              return false;
            }
          }
          return true;
        } else if constexpr (std::is_same_v<T, BallShape>) {
          if (s.domain && !s.domain->contains(x)) return false;
          return (x - s.center).norm() <= s.radius;
        } else if constexpr (std::is_same_v<T, VoronoiShape>) {
          if (s.domain && !s.domain->contains(x)) return false;
          return nearest_center(*s.centers, x) == s.center;
        } else {
          return x.allFinite();
        }
      },
      shape_);
}

double Region::depth(const Point& x) const {
  if (!contains(x)) return 0.0;
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, BoxShape>) {
          double d = 1.0;
          for (Eigen::Index k = 0; k < x.size(); ++k) {
            const double half = 0.5 * (s.box.hi[k] - s.box.lo[k]);
            const double to_face = std::min(x[k] - s.box.lo[k], s.box.hi[k] - x[k]);
            d = std::min(d, to_face / half);
          }
          return std::clamp(d, 0.0, 1.0);
        } else if constexpr (std::is_same_v<T, BallShape>) {
          return std::max(0.0, 1.0 - (x - s.center).norm() / s.radius);
        } else {
          return 1.0;
        }
      },
      shape_);
}

double Region::max_norm() const {
  const auto bb = bounding_box();
  if (!bb) return std::numeric_limits<double>::infinity();
  if (const auto* ball = std::get_if<BallShape>(&shape_); ball && !ball->domain) {
    return ball->center.norm() + ball->radius;
  }
  return bb->lo.cwiseAbs().cwiseMax(bb->hi.cwiseAbs()).norm();
}

std::optional<Box> Region::bounding_box() const {
  return std::visit(
      [](const auto& s) -> std::optional<Box> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, BoxShape>) {
          return s.box;
        } else if constexpr (std::is_same_v<T, BallShape>) {
          Box b{s.center.array() - s.radius, s.center.array() + s.radius};
          return s.domain ? b.intersect(*s.domain) : b;
        } else if constexpr (std::is_same_v<T, VoronoiShape>) {
          return s.domain;
        } else {
          return std::nullopt;
        }
      },
      shape_);
}

nlohmann::json point_to_json(const Point& x) {
  nlohmann::json j = nlohmann::json::array();
  for (Eigen::Index k = 0; k < x.size(); ++k) j.push_back(x[k]);
  return j;
}

Point point_from_json(const nlohmann::json& j) {
  if (j.is_number()) return make_point({j.get<double>()});
  Point p(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) p[static_cast<Eigen::Index>(k)] = j[k].get<double>();
  return p;
}

nlohmann::json box_to_json(const Box& box) {
  nlohmann::json j = nlohmann::json::array();
  for (int k = 0; k < box.dim(); ++k) j.push_back({box.lo[k], box.hi[k]});
  return j;
}

Box box_from_json(const nlohmann::json& j) {
  const auto d = static_cast<Eigen::Index>(j.size());
  Box b{Point(d), Point(d)};
  for (Eigen::Index k = 0; k < d; ++k) {
    const auto& range = j[static_cast<std::size_t>(k)];
    if (!range.is_array() || range.size() != 2) throw std::invalid_argument("bounds must be a list of [lo, hi] pairs");
    b.lo[k] = range[0].get<double>();
    b.hi[k] = range[1].get<double>();
  }
  return b;
}

nlohmann::json Region::to_json() const {
  return std::visit(
      [&](const auto& s) -> nlohmann::json {
        using T = std::decay_t<decltype(s)>;
        nlohmann::json j;
        j["index"] = index_;
        if constexpr (std::is_same_v<T, BoxShape>) {
          j["shape"] = "box";
          j["bounds"] = box_to_json(s.box);
          j["closed_upper"] = s.closed_upper;
        } else if constexpr (std::is_same_v<T, BallShape>) {
          j["shape"] = "ball";
          j["center"] = point_to_json(s.center);
          j["radius"] = s.radius;
          if (s.domain) j["domain"] = box_to_json(*s.domain);
        } else if constexpr (std::is_same_v<T, VoronoiShape>) {
          j["shape"] = "voronoi_cell";
          j["center"] = s.center;
        } else {
          j["shape"] = "whole";
          j["dim"] = s.dim;
        }
        return j;
      },
      shape_);
}

}  // namespace locsvm
