#pragma once

#include "locsvm/types.hpp"

#include <json.hpp>

#include <cstddef>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

namespace locsvm {

/// Axis-aligned cell. Lower faces are closed; an upper face is closed only
/// where `closed_upper[k]` is set (the last cell of a grid along axis k).
struct BoxShape {
  Box box;
  std::vector<bool> closed_upper;
};

/// Closed ball, optionally clipped to a domain box.
struct BallShape {
  Point center;
  double radius = 0.0;
  std::optional<Box> domain;
};

/// Voronoi cell of `centers[center]`; ties go to the lower center index.
struct VoronoiShape {
  std::shared_ptr<const std::vector<Point>> centers;
  std::size_t center = 0;
  std::optional<Box> domain;
};

/// All of R^d (the one-region regionalization behind a global SVM).
struct WholeSpaceShape {
  int dim = 1;
};

using RegionShape = std::variant<BoxShape, BallShape, VoronoiShape, WholeSpaceShape>;

/// Index of the nearest center, lower index on ties.
std::size_t nearest_center(const std::vector<Point>& centers, const Point& x);

class Region {
 public:
  Region(RegionShape shape, std::size_t index);

  static Region interval(double lo, double hi, bool closed_hi, std::size_t index);
  static Region box(Box box, std::vector<bool> closed_upper, std::size_t index);
  static Region ball(Point center, double radius, std::optional<Box> domain, std::size_t index);
  static Region voronoi_cell(std::shared_ptr<const std::vector<Point>> centers, std::size_t center,
                             std::optional<Box> domain, std::size_t index);
  static Region whole(int dim, std::size_t index);

  [[nodiscard]] bool contains(const Point& x) const;

  /// Bump profile in [0, 1] that is positive on the interior of the region
  /// and vanishes on its boundary and outside it.
  [[nodiscard]] double depth(const Point& x) const;

  /// sup over the region of ||x||_2, +inf when unbounded.
  [[nodiscard]] double max_norm() const;

  /// Bounding box when the region is bounded.
  [[nodiscard]] std::optional<Box> bounding_box() const;

  [[nodiscard]] int dim() const;
  [[nodiscard]] std::size_t index() const { return index_; }
  [[nodiscard]] const RegionShape& shape() const { return shape_; }

  [[nodiscard]] nlohmann::json to_json() const;

 private:
  RegionShape shape_;
  std::size_t index_;
};

nlohmann::json box_to_json(const Box& box);
Box box_from_json(const nlohmann::json& j);
nlohmann::json point_to_json(const Point& x);
Point point_from_json(const nlohmann::json& j);

}  // namespace locsvm
