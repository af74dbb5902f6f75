#pragma once

// Small forward-mode differentiation helpers. The vector fields in this
// library are rational, so ring operations plus division are all that is
// needed to obtain exact derivatives (up to rounding).

namespace bifurc::detail {

// First-order dual number: value plus one directional derivative.
struct Dual {
  double v = 0.0;
  double d = 0.0;

  Dual() = default;
  Dual(double value) : v(value) {}
  Dual(double value, double deriv) : v(value), d(deriv) {}
};

inline Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
inline Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
inline Dual operator-(Dual a) { return {-a.v, -a.d}; }
inline Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
inline Dual operator/(Dual a, Dual b) {
  double inv = 1.0 / b.v;
  double q = a.v * inv;
  return {q, (a.d - q * b.d) * inv};
}
inline Dual operator+(Dual a, double b) { return {a.v + b, a.d}; }
inline Dual operator+(double a, Dual b) { return {a + b.v, b.d}; }
inline Dual operator-(Dual a, double b) { return {a.v - b, a.d}; }
inline Dual operator-(double a, Dual b) { return {a - b.v, -b.d}; }
inline Dual operator*(Dual a, double b) { return {a.v * b, a.d * b}; }
inline Dual operator*(double a, Dual b) { return {a * b.v, a * b.d}; }
inline Dual operator/(Dual a, double b) { return {a.v / b, a.d / b}; }
inline Dual operator/(double a, Dual b) { return Dual(a) / b; }

// Bivariate Taylor polynomial truncated at total degree 3. c[i][j] is the
// coefficient of x^i y^j; the partial derivative d^(i+j)f/dx^i dy^j equals
// c[i][j] * i! * j!.
struct Jet2 {
  double c[4][4] = {};

  static Jet2 constant(double v) {
    Jet2 j;
    j.c[0][0] = v;
    return j;
  }
  // which = 0 seeds x, which = 1 seeds y.
  static Jet2 variable(int which, double base) {
    Jet2 j;
    j.c[0][0] = base;
    if (which == 0)
      j.c[1][0] = 1.0;
    else
      j.c[0][1] = 1.0;
    return j;
  }
  double value() const { return c[0][0]; }
};

inline Jet2 operator+(const Jet2& a, const Jet2& b) {
  Jet2 r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; i + j < 4; ++j) r.c[i][j] = a.c[i][j] + b.c[i][j];
  return r;
}
inline Jet2 operator-(const Jet2& a, const Jet2& b) {
  Jet2 r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; i + j < 4; ++j) r.c[i][j] = a.c[i][j] - b.c[i][j];
  return r;
}
inline Jet2 operator-(const Jet2& a) {
  Jet2 r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; i + j < 4; ++j) r.c[i][j] = -a.c[i][j];
  return r;
}
inline Jet2 operator*(const Jet2& a, const Jet2& b) {
  Jet2 r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; i + j < 4; ++j) {
      if (a.c[i][j] == 0.0) continue;
      for (int k = 0; i + j + k < 4; ++k)
        for (int l = 0; i + j + k + l < 4; ++l)
          r.c[i + k][j + l] += a.c[i][j] * b.c[k][l];
    }
  return r;
}
inline Jet2 operator*(const Jet2& a, double s) {
  Jet2 r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; i + j < 4; ++j) r.c[i][j] = a.c[i][j] * s;
  return r;
}
inline Jet2 operator*(double s, const Jet2& a) { return a * s; }
inline Jet2 operator+(const Jet2& a, double s) {
  Jet2 r = a;
  r.c[0][0] += s;
  return r;
}
inline Jet2 operator+(double s, const Jet2& a) { return a + s; }
inline Jet2 operator-(const Jet2& a, double s) { return a + (-s); }
inline Jet2 operator-(double s, const Jet2& a) { return (-a) + s; }

// Reciprocal by Newton iteration on the truncated series; two iterations
// raise the correct order from 0 to 3.
inline Jet2 reciprocal(const Jet2& a) {
  Jet2 r = Jet2::constant(1.0 / a.c[0][0]);
  for (int it = 0; it < 2; ++it) r = r + r * (Jet2::constant(1.0) - a * r);
  return r;
}
inline Jet2 operator/(const Jet2& a, const Jet2& b) { return a * reciprocal(b); }
inline Jet2 operator/(const Jet2& a, double s) { return a * (1.0 / s); }
inline Jet2 operator/(double s, const Jet2& b) { return reciprocal(b) * s; }

}  // namespace bifurc::detail
