#pragma once

#include <cmath>

namespace hnet {

// Truncated second-order Taylor scalar in two variables (theta, phi):
// value, gradient (d0, d1) and the symmetric Hessian (h00, h01, h11).
struct DualScalar2 {
  double v = 0.0;
  double d0 = 0.0, d1 = 0.0;
  double h00 = 0.0, h01 = 0.0, h11 = 0.0;

  constexpr DualScalar2() = default;
  constexpr DualScalar2(double value) : v(value) {}  // NOLINT: implicit lift of constants
  constexpr DualScalar2(double value, double g0, double g1, double a00 = 0.0, double a01 = 0.0,
                        double a11 = 0.0)
      : v(value), d0(g0), d1(g1), h00(a00), h01(a01), h11(a11) {}

  static constexpr DualScalar2 variable(double value, int slot) {
    return slot == 0 ? DualScalar2(value, 1.0, 0.0) : DualScalar2(value, 0.0, 1.0);
  }

  DualScalar2& operator+=(const DualScalar2& o) {
    v += o.v;
    d0 += o.d0;
    d1 += o.d1;
    h00 += o.h00;
    h01 += o.h01;
    h11 += o.h11;
    return *this;
  }
  DualScalar2& operator-=(const DualScalar2& o) {
    v -= o.v;
    d0 -= o.d0;
    d1 -= o.d1;
    h00 -= o.h00;
    h01 -= o.h01;
    h11 -= o.h11;
    return *this;
  }
  DualScalar2& operator*=(const DualScalar2& o) {
    *this = mul(*this, o);
    return *this;
  }
  DualScalar2& operator+=(double s) {
    v += s;
    return *this;
  }
  DualScalar2& operator*=(double s) {
    v *= s;
    d0 *= s;
    d1 *= s;
    h00 *= s;
    h01 *= s;
    h11 *= s;
    return *this;
  }

  static constexpr DualScalar2 mul(const DualScalar2& a, const DualScalar2& b) {
    return {a.v * b.v,
            a.d0 * b.v + a.v * b.d0,
            a.d1 * b.v + a.v * b.d1,
            a.h00 * b.v + 2.0 * a.d0 * b.d0 + a.v * b.h00,
            a.h01 * b.v + a.d0 * b.d1 + a.d1 * b.d0 + a.v * b.h01,
            a.h11 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.h11};
  }

  /// Applies a scalar function with derivatives f(v), f'(v), f''(v).
  constexpr DualScalar2 chain(double f, double df, double ddf) const {
    return {f,
            df * d0,
            df * d1,
            df * h00 + ddf * d0 * d0,
            df * h01 + ddf * d0 * d1,
            df * h11 + ddf * d1 * d1};
  }
};

inline DualScalar2 operator+(DualScalar2 a, const DualScalar2& b) { return a += b; }
inline DualScalar2 operator-(DualScalar2 a, const DualScalar2& b) { return a -= b; }
inline DualScalar2 operator-(const DualScalar2& a) {
  return {-a.v, -a.d0, -a.d1, -a.h00, -a.h01, -a.h11};
}
inline DualScalar2 operator*(const DualScalar2& a, const DualScalar2& b) {
  return DualScalar2::mul(a, b);
}
inline DualScalar2 operator+(DualScalar2 a, double s) { return a += s; }
inline DualScalar2 operator+(double s, DualScalar2 a) { return a += s; }
inline DualScalar2 operator-(DualScalar2 a, double s) { return a += -s; }
inline DualScalar2 operator-(double s, const DualScalar2& a) { return -a + s; }
inline DualScalar2 operator*(DualScalar2 a, double s) { return a *= s; }
inline DualScalar2 operator*(double s, DualScalar2 a) { return a *= s; }
inline DualScalar2 operator/(const DualScalar2& a, double s) { return a * (1.0 / s); }

inline DualScalar2 reciprocal(const DualScalar2& b) {
  const double r = 1.0 / b.v;
  return b.chain(r, -r * r, 2.0 * r * r * r);
}
inline DualScalar2 operator/(const DualScalar2& a, const DualScalar2& b) {
  return a * reciprocal(b);
}
inline DualScalar2 operator/(double s, const DualScalar2& b) { return s * reciprocal(b); }

inline DualScalar2 sin(const DualScalar2& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return a.chain(s, c, -s);
}
inline DualScalar2 cos(const DualScalar2& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return a.chain(c, -s, -c);
}
inline DualScalar2 exp(const DualScalar2& a) {
  const double e = std::exp(a.v);
  return a.chain(e, e, e);
}
inline DualScalar2 log(const DualScalar2& a) {
  return a.chain(std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v));
}
inline DualScalar2 sqrt(const DualScalar2& a) {
  const double r = std::sqrt(a.v);
  return a.chain(r, 0.5 / r, -0.25 / (r * a.v));
}

inline double value_of(double x) { return x; }
inline double value_of(const DualScalar2& x) { return x.v; }

}  // namespace hnet
