#include "bifurc/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "bifurc/detail/kernels.hpp"
#include "bifurc/equilibria.hpp"
#include "bifurc/errors.hpp"

namespace bifurc {

using std::complex;
using namespace detail;

CharPoly char_poly_unchecked(const ParameterSet& p, const State& x) {
  Matrix J = jacobian(p, x);
  CharPoly cp;
  if (J.dim == 2) {
    cp.degree = 2;
    cp.c = {J.det(), -J.trace(), 0.0};
  } else {
    cp.degree = 3;
    cp.c = {-J.det(), J.minor_sum(), -J.trace()};
  }
  return cp;
}

CharPoly char_poly(const ParameterSet& p, const State& x) {
  State r = rhs(p, x);
  double tol = 1e-9 * (1.0 + x.inf_norm());
  if (r.inf_norm() >= tol)
    throw ContractViolation("char_poly called off-equilibrium: ||rhs|| = " +
                            std::to_string(r.inf_norm()));
  return char_poly_unchecked(p, x);
}

namespace {

void quadratic_eigs(double t, double delta, complex<double> out[2]) {
  double disc = t * t - 4.0 * delta;
  if (disc < 0.0) {
    double im = 0.5 * std::sqrt(-disc);
    out[0] = {-0.5 * t, im};
    out[1] = {-0.5 * t, -im};
    return;
  }
  double s = std::sqrt(disc);
  double q = -0.5 * (t + std::copysign(s, t));
  double r1 = q;
  double r2 = (q != 0.0) ? delta / q : 0.0;
  out[0] = {std::min(r1, r2), 0.0};
  out[1] = {std::max(r1, r2), 0.0};
}

complex<double> cubic_eval(const CharPoly& cp, complex<double> z) {
  return ((z + cp.c[2]) * z + cp.c[1]) * z + cp.c[0];
}

void cubic_roots(const CharPoly& cp, complex<double> out[3]) {
  // Depressed form z^3 + p z + q with L = z - c2/3, then Newton polish on
  // the original polynomial.
  double c2 = cp.c[2], c1 = cp.c[1], c0 = cp.c[0];
  double p = c1 - c2 * c2 / 3.0;
  double q = c0 - c2 * c1 / 3.0 + 2.0 * c2 * c2 * c2 / 27.0;
  double disc = -4.0 * p * p * p - 27.0 * q * q;
  if (disc >= 0.0) {
    double r = std::sqrt(std::max(0.0, -p / 3.0));
    double arg = 0.0;
    if (r > 0.0) arg = std::clamp(3.0 * q / (2.0 * p) * std::sqrt(-3.0 / p), -1.0, 1.0);
    double th = std::acos(arg);
    for (int k = 0; k < 3; ++k)
      out[k] = 2.0 * r * std::cos((th - 2.0 * std::numbers::pi * k) / 3.0) - c2 / 3.0;
  } else {
    double s = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
    double u = std::cbrt(-q / 2.0 - std::copysign(s, q));
    double v = (u != 0.0) ? -p / (3.0 * u) : 0.0;
    double z0 = u + v;
    double im2 = 4.0 * (p + z0 * z0) - z0 * z0;
    double im = 0.5 * std::sqrt(std::max(0.0, im2));
    out[0] = complex<double>(z0 - c2 / 3.0, 0.0);
    out[1] = complex<double>(-z0 / 2.0 - c2 / 3.0, im);
    out[2] = std::conj(out[1]);
  }
  for (int k = 0; k < 3; ++k) {
    complex<double> z = out[k];
    for (int it = 0; it < 4; ++it) {
      complex<double> f = cubic_eval(cp, z);
      complex<double> df = (3.0 * z + 2.0 * c2) * z + c1;
      if (std::abs(df) == 0.0) break;
      z -= f / df;
    }
    // Keep conjugate symmetry for nearly real polynomials.
    if (std::fabs(z.imag()) < 1e-14 * (1.0 + std::abs(z))) z = {z.real(), 0.0};
    out[k] = z;
  }
  if (out[1].imag() != 0.0 && out[2].imag() != 0.0) {
    complex<double> avg = 0.5 * (out[1] + std::conj(out[2]));
    out[1] = avg;
    out[2] = std::conj(avg);
  }
}

}  // namespace

std::vector<complex<double>> eigenvalues(const CharPoly& cp) {
  std::vector<complex<double>> ev;
  if (cp.degree == 2) {
    complex<double> r[2];
    quadratic_eigs(cp.t(), cp.delta(), r);
    ev = {r[0], r[1]};
  } else {
    complex<double> r[3];
    cubic_roots(cp, r);
    ev = {r[0], r[1], r[2]};
    std::sort(ev.begin(), ev.end(), [](auto a, auto b) {
      return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
  }
  for (auto z : ev) {
    double scale = 1.0 + std::pow(std::abs(z), cp.degree);
    complex<double> res = cp.degree == 2 ? (z + cp.c[1]) * z + cp.c[0] : cubic_eval(cp, z);
    if (std::abs(res) >= 1e-9 * scale)
      throw NumericalError("eigenvalue residual " + std::to_string(std::abs(res)) +
                           " out of tolerance");
  }
  return ev;
}

StabilityReport classify_stability(const CharPoly& cp) {
  StabilityReport rep;
  rep.eigenvalues = eigenvalues(cp);
  bool nonhyp = false, any_pos = false, any_neg = false, any_complex = false;
  for (auto z : rep.eigenvalues) {
    if (std::fabs(z.real()) < 1e-9 * std::max(1.0, std::abs(z))) nonhyp = true;
    if (z.real() > 0.0) any_pos = true;
    if (z.real() < 0.0) any_neg = true;
    if (z.imag() != 0.0) any_complex = true;
  }
  if (nonhyp)
    rep.cls = StabilityClass::nonhyperbolic;
  else if (any_pos && any_neg)
    rep.cls = StabilityClass::saddle;
  else if (any_pos)
    rep.cls = any_complex ? StabilityClass::unstable_focus : StabilityClass::unstable_node;
  else
    rep.cls = any_complex ? StabilityClass::stable_focus : StabilityClass::stable_node;
  return rep;
}

StabilityReport stability(const ParameterSet& p, const State& x) {
  return classify_stability(char_poly_unchecked(p, x));
}

double inhost_trace_num(const ParameterSet& p, double y) {
  double A = p[IH_A], B = p[IH_B], C = p[IH_C], D = p[IH_D];
  double ab = A + B;
  return ab * ab * y * y * y + (2.0 * B * C + D) * ab * y * y +
         (B * B * C * C + A * C * D + 2.0 * B * C * D - A * C) * y + B * C * C * D;
}

double inhost_det_num(const ParameterSet& p, double y) {
  double A = p[IH_A], B = p[IH_B], C = p[IH_C], D = p[IH_D];
  double ab = A + B;
  return ab * ab * y * y * y + 2.0 * ab * B * C * y * y + (B * B * C - A * D) * C * y;
}

namespace {

// h2 as an explicit quadratic in the infected component; equals the
// difference of the trace and determinant numerators.
double inhost_h2(double A, double B, double C, double D, double y) {
  return D * (A + B) * y * y + (2.0 * C * D * (A + B) - A * C) * y + B * C * C * D;
}

double h_value(const ParameterSet& p, double y, bool eliminate) {
  const double* v = p.values().data();
  switch (p.model()) {
    case ModelId::sir_treatment: {
      // The destabilizing terms carry the full post-infection removal rate
      // (gamma + epsilon); the tabulated intervals confirm this form.
      double k = v[SIR_K], d = v[SIR_D], beta = v[SIR_BETA];
      double ge = v[SIR_GAMMA] + v[SIR_EPS];
      double al = v[SIR_ALPHA], om = v[SIR_OMEGA];
      double od = om + y;
      double bracket = (1.0 + k * y) * d * d * od * od - beta * ge * y * od * od -
                       al * beta * om * y;
      return (d * k * y + beta * y + d) * bracket / d;
    }
    case ModelId::inhost_convex: {
      double B = v[IH_B];
      if (eliminate) B = branch_param(ModelId::inhost_convex, v, y);
      return inhost_h2(v[IH_A], B, v[IH_C], v[IH_D], y);
    }
    default:
      throw std::invalid_argument("h_indicator is defined for SIR_TREATMENT and "
                                  "INHOST_CONVEX only");
  }
}

// Sign of h as the scan variable grows without bound; decides whether an
// open negativity window extends to infinity.
int h_tail_sign(const ParameterSet& p, bool eliminate) {
  const double* v = p.values().data();
  if (p.model() == ModelId::sir_treatment) {
    double lead = v[SIR_K] * v[SIR_D] * v[SIR_D] - v[SIR_BETA] * (v[SIR_GAMMA] + v[SIR_EPS]);
    return lead < 0.0 ? -1 : 1;
  }
  if (!eliminate) return 1;  // leading coefficient D*(A+B) > 0
  double q2 = v[IH_A] * v[IH_C] * (v[IH_D] - 1.0) - v[IH_D] * v[IH_D];
  return q2 < 0.0 ? -1 : 1;
}

}  // namespace

HIndicator h_indicator(const ParameterSet& p, double infected_value, bool eliminate_param,
                       double scan_max) {
  HIndicator out;
  out.value = h_value(p, infected_value, eliminate_param);

  const int n = 1024;
  const double lo = 1e-6;
  double ratio = std::pow(scan_max / lo, 1.0 / (n - 1));
  auto sign_at = [&](double y) -> int {
    double h = h_value(p, y, eliminate_param);
    if (std::isnan(h)) return 0;
    return h < 0.0 ? -1 : 1;
  };
  auto refine = [&](double a, double b) {
    int sa = sign_at(a);
    while (b - a > 1e-6) {
      double mid = 0.5 * (a + b);
      int sm = sign_at(mid);
      if (sm == sa)
        a = mid;
      else
        b = mid;
    }
    return 0.5 * (a + b);
  };

  double x = lo;
  int prev = sign_at(x);
  double prev_x = x;
  double left = lo;
  bool open = prev < 0;
  for (int i = 1; i < n; ++i) {
    x *= ratio;
    int s = sign_at(x);
    if (s == 0) {
      prev_x = x;
      prev = 0;
      continue;
    }
    if (!open && prev > 0 && s < 0) {
      left = refine(prev_x, x);
      open = true;
    } else if (open && prev < 0 && s > 0) {
      out.negativity = {left, refine(prev_x, x)};
      return out;
    }
    prev = s;
    prev_x = x;
  }
  if (open) {
    if (h_tail_sign(p, eliminate_param) < 0)
      out.negativity = {left, std::numeric_limits<double>::infinity()};
    else
      out.negativity = {left, scan_max};
  }
  return out;
}

}  // namespace bifurc
