#pragma once

#include "locsvm/types.hpp"

#include <json.hpp>

#include <variant>
#include <vector>

namespace locsvm {

/// level + slope*(x - start) + amplitude*sin(2*pi*frequency*(x - start) + phase)
/// on [start, end).
struct SinePiece {
  double start = 0.0;
  double end = 1.0;
  double level = 0.0;
  double slope = 0.0;
  double amplitude = 0.0;
  double frequency = 0.0;
  double phase = 0.0;

  [[nodiscard]] double operator()(double x) const;
};

/// Regression target functions usable as Bayes functions of synthetic
/// distributions.
class Target {
 public:
  /// amplitude * sin(angular * x[axis] + phase)
  static Target sine(double amplitude, double angular, double phase = 0.0, int axis = 0);
  static Target constant(double value);
  /// coef . x + intercept
  static Target linear(Point coef, double intercept);
  /// 1-D piecewise target. Pieces must be contiguous and ascending; the last
  /// piece is closed at its end. Evaluation outside the pieces throws.
  static Target piecewise(std::vector<SinePiece> pieces);

  [[nodiscard]] double operator()(const Point& x) const;
  /// Upper bound on sup |f| over `support`.
  [[nodiscard]] double sup_bound(const Box& support) const;
  [[nodiscard]] const std::vector<SinePiece>* pieces() const;

  [[nodiscard]] nlohmann::json to_json() const;
  static Target from_json(const nlohmann::json& j);

 private:
  struct Sine {
    double amplitude, angular, phase;
    int axis;
  };
  struct Constant {
    double value;
  };
  struct Linear {
    Point coef;
    double intercept;
  };
  struct Piecewise {
    std::vector<SinePiece> pieces;
  };
  using Form = std::variant<Sine, Constant, Linear, Piecewise>;
  explicit Target(Form form) : form_(std::move(form)) {}
  Form form_;
};

}  // namespace locsvm
