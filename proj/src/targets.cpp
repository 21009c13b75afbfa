#include "locsvm/targets.hpp"

#include "locsvm/region.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace locsvm {

double SinePiece::operator()(double x) const {
  const double u = x - start;
  return level + slope * u + amplitude * std::sin(2.0 * std::numbers::pi * frequency * u + phase);
}

Target Target::sine(double amplitude, double angular, double phase, int axis) {
  if (axis < 0) throw std::invalid_argument("Target::sine: negative axis");
  return Target(Sine{amplitude, angular, phase, axis});
}

Target Target::constant(double value) { return Target(Constant{value}); }

Target Target::linear(Point coef, double intercept) { return Target(Linear{std::move(coef), intercept}); }

Target Target::piecewise(std::vector<SinePiece> pieces) {
  if (pieces.empty()) throw std::invalid_argument("Target::piecewise: no pieces");
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    if (!(pieces[k].end > pieces[k].start)) throw std::invalid_argument("Target::piecewise: empty piece");
    if (k > 0 && pieces[k].start != pieces[k - 1].end) {
      throw std::invalid_argument("Target::piecewise: pieces must be contiguous");
    }
  }
  return Target(Piecewise{std::move(pieces)});
}

double Target::operator()(const Point& x) const {
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Sine>) {
          if (f.axis >= x.size()) throw std::invalid_argument("Target: point has too few coordinates");
          return f.amplitude * std::sin(f.angular * x[f.axis] + f.phase);
        } else if constexpr (std::is_same_v<T, Constant>) {
          return f.value;
        } else if constexpr (std::is_same_v<T, Linear>) {
          if (f.coef.size() != x.size()) throw std::invalid_argument("Target: dimension mismatch");
          return f.coef.dot(x) + f.intercept;
        } else {
          const double t = x[0];
          const auto& ps = f.pieces;
          if (t < ps.front().start || t > ps.back().end || std::isnan(t)) {
            std::ostringstream msg;
            msg << "Target: x = " << t << " outside [" << ps.front().start << ", " << ps.back().end << "]";
            throw std::out_of_range(msg.str());
          }
          for (const auto& p : ps) {
            if (t < p.end) return p(t);
          }
          return ps.back()(t);
        }
      },
      form_);
}

double Target::sup_bound(const Box& support) const {
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Sine>) {
          return std::abs(f.amplitude);
        } else if constexpr (std::is_same_v<T, Constant>) {
          return std::abs(f.value);
        } else if constexpr (std::is_same_v<T, Linear>) {
          double s = std::abs(f.intercept);
          for (Eigen::Index k = 0; k < f.coef.size(); ++k) {
            s += std::abs(f.coef[k]) * std::max(std::abs(support.lo[k]), std::abs(support.hi[k]));
          }
          return s;
        } else {
          double s = 0.0;
          for (const auto& p : f.pieces) {
            s = std::max(s, std::abs(p.level) + std::abs(p.slope) * (p.end - p.start) + std::abs(p.amplitude));
          }
          return s;
        }
      },
      form_);
}

const std::vector<SinePiece>* Target::pieces() const {
  if (const auto* p = std::get_if<Piecewise>(&form_)) return &p->pieces;
  return nullptr;
}

nlohmann::json Target::to_json() const {
  return std::visit(
      [](const auto& f) -> nlohmann::json {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Sine>) {
          return {{"type", "sine"}, {"amplitude", f.amplitude}, {"angular", f.angular}, {"phase", f.phase},
                  {"axis", f.axis}};
        } else if constexpr (std::is_same_v<T, Constant>) {
          return {{"type", "constant"}, {"value", f.value}};
        } else if constexpr (std::is_same_v<T, Linear>) {
          return {{"type", "linear"}, {"coef", point_to_json(f.coef)}, {"intercept", f.intercept}};
        } else {
          nlohmann::json ps = nlohmann::json::array();
          for (const auto& p : f.pieces) {
            ps.push_back({{"start", p.start}, {"end", p.end}, {"level", p.level}, {"slope", p.slope},
                          {"amplitude", p.amplitude}, {"frequency", p.frequency}, {"phase", p.phase}});
          }
          return {{"type", "piecewise"}, {"pieces", ps}};
        }
      },
      form_);
}

Target Target::from_json(const nlohmann::json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "sine") {
    return sine(j.value("amplitude", 1.0), j.value("angular", 1.0), j.value("phase", 0.0), j.value("axis", 0));
  }
  if (type == "constant") return constant(j.at("value").get<double>());
  if (type == "linear") return linear(point_from_json(j.at("coef")), j.value("intercept", 0.0));
  if (type == "piecewise") {
    std::vector<SinePiece> ps;
    for (const auto& p : j.at("pieces")) {
      ps.push_back(SinePiece{p.at("start").get<double>(), p.at("end").get<double>(), p.value("level", 0.0),
                             p.value("slope", 0.0), p.value("amplitude", 0.0), p.value("frequency", 0.0),
                             p.value("phase", 0.0)});
    }
    return piecewise(std::move(ps));
  }
  throw std::invalid_argument("unknown target type '" + type + "'");
}

}  // namespace locsvm
