#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace locsvm {

using Point = Eigen::VectorXd;

struct Sample {
  Point x;
  double y = 0.0;
};

using Dataset = std::vector<Sample>;

using Predictor = std::function<double(const Point&)>;

/// Closed axis-aligned box [lo, hi] in R^d.
struct Box {
  Point lo;
  Point hi;

  [[nodiscard]] int dim() const { return static_cast<int>(lo.size()); }
  [[nodiscard]] bool contains(const Point& x) const;
  [[nodiscard]] double volume() const;
  [[nodiscard]] bool nondegenerate() const;
  [[nodiscard]] Box intersect(const Box& other) const;

  static Box interval(double lo, double hi);
};

/// Convenience for 1-D and literal points.
Point make_point(std::initializer_list<double> values);

}  // namespace locsvm
