#pragma once

#include <cmath>

#include "lmdpinn/common.hpp"

namespace lmdpinn::ad {

// ---------------------------------------------------------------------------
// Jet2: truncated second-order Taylor coefficients along a single direction.
//
// Carries (value, d1, d2) where d1 and d2 are the first and second directional
// derivatives of the computed quantity with respect to one scalar direction.
// Composition follows the chain rule exactly, so derivatives of any expression
// built from these primitives are exact to rounding:
//   (g∘f):  d1 = g'(f)·f.d1,  d2 = g''(f)·f.d1² + g'(f)·f.d2
// ---------------------------------------------------------------------------

struct Jet2 {
  double v = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;

  Jet2() = default;
  constexpr Jet2(double value) : v(value) {}  // constants have zero derivatives
  constexpr Jet2(double value, double first, double second) : v(value), d1(first), d2(second) {}

  /// Seed for differentiating with respect to the variable itself: (x, 1, 0).
  static constexpr Jet2 variable(double x) { return Jet2(x, 1.0, 0.0); }

  Jet2 operator-() const { return {-v, -d1, -d2}; }

  Jet2& operator+=(const Jet2& o) {
    v += o.v;
    d1 += o.d1;
    d2 += o.d2;
    return *this;
  }
  Jet2& operator-=(const Jet2& o) {
    v -= o.v;
    d1 -= o.d1;
    d2 -= o.d2;
    return *this;
  }
  Jet2& operator*=(const Jet2& o) {
    // product rule up to second order: (fg)'' = f''g + 2f'g' + fg''
    d2 = d2 * o.v + 2.0 * d1 * o.d1 + v * o.d2;
    d1 = d1 * o.v + v * o.d1;
    v *= o.v;
    return *this;
  }
  Jet2& operator/=(const Jet2& o) { return *this *= inverse(o); }

  static Jet2 inverse(const Jet2& x) {
    const double inv = 1.0 / x.v;
    const double inv2 = inv * inv;
    return {inv, -x.d1 * inv2, (2.0 * x.d1 * x.d1 * inv - x.d2) * inv2};
  }
};

inline Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
inline Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }
inline Jet2 operator*(Jet2 a, const Jet2& b) { return a *= b; }
inline Jet2 operator/(Jet2 a, const Jet2& b) { return a /= b; }

inline Jet2 operator+(double a, Jet2 b) { return Jet2(a) += b; }
inline Jet2 operator-(double a, const Jet2& b) { return Jet2(a) -= b; }
inline Jet2 operator*(double a, Jet2 b) { return Jet2(a) *= b; }
inline Jet2 operator/(double a, const Jet2& b) { return Jet2(a) /= b; }
inline Jet2 operator+(Jet2 a, double b) { return a += Jet2(b); }
inline Jet2 operator-(Jet2 a, double b) { return a -= Jet2(b); }
inline Jet2 operator*(Jet2 a, double b) { return a *= Jet2(b); }
inline Jet2 operator/(Jet2 a, double b) { return a /= Jet2(b); }

/// Unary chain rule application given g(v), g'(v), g''(v).
inline Jet2 apply_unary(const Jet2& x, double g, double gp, double gpp) {
  return {g, gp * x.d1, gpp * x.d1 * x.d1 + gp * x.d2};
}

inline Jet2 exp(const Jet2& x) {
  const double e = std::exp(x.v);
  return apply_unary(x, e, e, e);
}

inline Jet2 tanh(const Jet2& x) {
  const double th = std::tanh(x.v);
  const double sech2 = 1.0 - th * th;
  return apply_unary(x, th, sech2, -2.0 * th * sech2);
}

/// Numerically stable softplus: max(x,0) + log1p(exp(-|x|)).
inline double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline Jet2 softplus(const Jet2& x) {
  const double s = sigmoid(x.v);
  return apply_unary(x, softplus(x.v), s, s * (1.0 - s));
}

inline Jet2 square(const Jet2& x) { return x * x; }
inline Jet2 sqrt(const Jet2& x) {
  const double r = std::sqrt(x.v);
  return apply_unary(x, r, 0.5 / r, -0.25 / (r * x.v));
}

inline Jet2 log(const Jet2& x) {
  const double inv = 1.0 / x.v;
  return apply_unary(x, std::log(x.v), inv, -inv * inv);
}

/// value() lets templated physics code read the point value of either plain
/// doubles or jets.
inline double value(double x) { return x; }
inline double value(const Jet2& x) { return x.v; }

inline bool is_finite(double x) { return std::isfinite(x); }
inline bool is_finite(const Jet2& x) {
  return std::isfinite(x.v) && std::isfinite(x.d1) && std::isfinite(x.d2);
}

}  // namespace lmdpinn::ad
