#pragma once

#include <cmath>
#include <string>
#include <variant>

#include "nonmono/error.hpp"

namespace nonmono {

struct Triangular {
  double a, b, c;
  bool operator==(const Triangular &) const = default;
};

/// Shoulder shapes are expressed with a == b (left) or c == d (right).
/// A right shoulder saturates: inputs above d keep full membership.
struct Trapezoidal {
  double a, b, c, d;
  bool operator==(const Trapezoidal &) const = default;
};

struct Gaussian {
  double mu, sigma;
  bool operator==(const Gaussian &) const = default;
};

/// Indicator of the closed interval [lower, upper].
struct Crisp {
  double lower, upper;
  bool operator==(const Crisp &) const = default;
};

using MembershipShape = std::variant<Triangular, Trapezoidal, Gaussian, Crisp>;

/// Which of the two membership families a fuzzy model reads from the KB.
enum class FmfFamily { linear, gaussian };

class MembershipFn {
public:
  MembershipFn() : shape_(Crisp{0.0, 0.0}) {}
  explicit MembershipFn(MembershipShape shape) : shape_(shape) { validate(); }

  const MembershipShape &shape() const { return shape_; }

  double operator()(double x) const {
    return std::visit([x](const auto &s) { return eval(s, x); }, shape_);
  }

  /// Point where membership is maximal (first such point for plateaus).
  double apex() const {
    return std::visit(
        [](const auto &s) -> double {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Triangular>) return s.b;
          else if constexpr (std::is_same_v<T, Trapezoidal>) return s.b;
          else if constexpr (std::is_same_v<T, Gaussian>) return s.mu;
          else return s.lower;
        },
        shape_);
  }

  bool operator==(const MembershipFn &) const = default;

private:
  static double ramp_up(double x, double lo, double hi) {
    if (x <= lo) return lo == hi && x == lo ? 1.0 : 0.0;
    if (x >= hi) return 1.0;
    return (x - lo) / (hi - lo);
  }
  static double ramp_down(double x, double lo, double hi) {
    if (x >= hi) return lo == hi && x == hi ? 1.0 : 0.0;
    if (x <= lo) return 1.0;
    return (hi - x) / (hi - lo);
  }

  static double eval(const Triangular &t, double x) {
    if (x < t.a || x > t.c) return 0.0;
    return x <= t.b ? ramp_up(x, t.a, t.b) : ramp_down(x, t.b, t.c);
  }
  static double eval(const Trapezoidal &t, double x) {
    if (x < t.a) return 0.0;
    if (x > t.d) return t.c == t.d ? 1.0 : 0.0;
    if (x < t.b) return ramp_up(x, t.a, t.b);
    if (x <= t.c) return 1.0;
    return ramp_down(x, t.c, t.d);
  }
  static double eval(const Gaussian &g, double x) {
    const double z = (x - g.mu) / g.sigma;
    return std::exp(-0.5 * z * z);
  }
  static double eval(const Crisp &c, double x) {
    return x >= c.lower && x <= c.upper ? 1.0 : 0.0;
  }

  void validate() const {
    std::visit(
        [](const auto &s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Triangular>) {
            if (!(s.a <= s.b && s.b <= s.c))
              throw Error("triangular parameters must satisfy a <= b <= c");
          } else if constexpr (std::is_same_v<T, Trapezoidal>) {
            if (!(s.a <= s.b && s.b <= s.c && s.c <= s.d))
              throw Error("trapezoidal parameters must satisfy a <= b <= c <= d");
          } else if constexpr (std::is_same_v<T, Gaussian>) {
            if (!(s.sigma > 0.0)) throw Error("gaussian sigma must be positive");
          } else {
            if (!(s.lower <= s.upper)) throw Error("crisp bounds must satisfy lower <= upper");
          }
        },
        shape_);
  }

  MembershipShape shape_;
};

inline const char *shape_name(const MembershipShape &s) {
  switch (s.index()) {
  case 0: return "triangular";
  case 1: return "trapezoidal";
  case 2: return "gaussian";
  default: return "crisp";
  }
}

} // namespace nonmono
