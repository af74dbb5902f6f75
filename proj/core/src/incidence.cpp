#include "bifurc/incidence.hpp"

#include <cmath>

#include "bifurc/detail/kernels.hpp"
#include "bifurc/errors.hpp"

namespace bifurc {

using namespace detail;

namespace {

constexpr std::string_view kCurveNames[] = {"saturating", "treatment_adjusted",
                                            "convex_fixed_host", "convex_on_branch"};

void check_model(IncidenceCurve c, const ParameterSet& p) {
  bool sir = c == IncidenceCurve::saturating || c == IncidenceCurve::treatment_adjusted;
  if (sir && p.model() != ModelId::sir_treatment && p.model() != ModelId::sir_concave)
    throw std::invalid_argument("curve needs SIR-family parameters");
  if (c == IncidenceCurve::treatment_adjusted && p.model() != ModelId::sir_treatment)
    throw std::invalid_argument("treatment_adjusted needs SIR_TREATMENT parameters");
  if (!sir && p.model() != ModelId::inhost_convex)
    throw std::invalid_argument("curve needs INHOST_CONVEX parameters");
}

}  // namespace

std::string_view incidence_curve_name(IncidenceCurve c) {
  return kCurveNames[static_cast<int>(c)];
}

std::optional<IncidenceCurve> incidence_curve_from_name(std::string_view name) {
  for (int i = 0; i < 4; ++i)
    if (name == kCurveNames[i]) return static_cast<IncidenceCurve>(i);
  return std::nullopt;
}

double default_ray_slope(IncidenceCurve c, const ParameterSet& p) {
  if (c == IncidenceCurve::saturating || c == IncidenceCurve::treatment_adjusted)
    return p[SIR_D] + p[SIR_GAMMA] + p[SIR_EPS];
  return 1.0;
}

double incidence_value(IncidenceCurve c, const ParameterSet& p, double s, double y) {
  check_model(c, p);
  const double* v = p.values().data();
  switch (c) {
    case IncidenceCurve::saturating:
      return v[SIR_BETA] * s * y / (1.0 + v[SIR_K] * y);
    case IncidenceCurve::treatment_adjusted:
      return v[SIR_BETA] * s * y / (1.0 + v[SIR_K] * y) -
             v[SIR_ALPHA] * y / (v[SIR_OMEGA] + y);
    case IncidenceCurve::convex_fixed_host:
      return (v[IH_B] + v[IH_A] * y / (y + v[IH_C])) * s * y;
    case IncidenceCurve::convex_on_branch: {
      double A = v[IH_A], B = v[IH_B], C = v[IH_C], D = v[IH_D];
      double q = (A + B) * y * y + (B * C + D) * y + C * D;
      return y * ((A + B) * y + B * C) / q;
    }
  }
  return 0;
}

double incidence_d1(IncidenceCurve c, const ParameterSet& p, double s, double y) {
  check_model(c, p);
  const double* v = p.values().data();
  switch (c) {
    case IncidenceCurve::saturating: {
      double den = 1.0 + v[SIR_K] * y;
      return v[SIR_BETA] * s / (den * den);
    }
    case IncidenceCurve::treatment_adjusted: {
      double den = 1.0 + v[SIR_K] * y;
      double od = v[SIR_OMEGA] + y;
      return v[SIR_BETA] * s / (den * den) - v[SIR_ALPHA] * v[SIR_OMEGA] / (od * od);
    }
    case IncidenceCurve::convex_fixed_host: {
      double A = v[IH_A], B = v[IH_B], C = v[IH_C];
      double den = y + C;
      return s * (B + A * (y * y + 2.0 * C * y) / (den * den));
    }
    case IncidenceCurve::convex_on_branch: {
      double A = v[IH_A], B = v[IH_B], C = v[IH_C], D = v[IH_D];
      double ab = A + B;
      double q = ab * y * y + (B * C + D) * y + C * D;
      return D * (ab * y * y + 2.0 * ab * C * y + B * C * C) / (q * q);
    }
  }
  return 0;
}

double incidence_d2(IncidenceCurve c, const ParameterSet& p, double s, double y) {
  check_model(c, p);
  const double* v = p.values().data();
  switch (c) {
    case IncidenceCurve::saturating: {
      double den = 1.0 + v[SIR_K] * y;
      return -2.0 * v[SIR_BETA] * v[SIR_K] * s / (den * den * den);
    }
    case IncidenceCurve::treatment_adjusted: {
      double den = 1.0 + v[SIR_K] * y;
      double od = v[SIR_OMEGA] + y;
      return -2.0 * v[SIR_BETA] * v[SIR_K] * s / (den * den * den) +
             2.0 * v[SIR_ALPHA] * v[SIR_OMEGA] / (od * od * od);
    }
    case IncidenceCurve::convex_fixed_host: {
      // 2AC^2 X / (Y+C)^3; positive for every positive Y, hence convex.
      double A = v[IH_A], C = v[IH_C];
      double den = y + C;
      return 2.0 * A * C * C * s / (den * den * den);
    }
    case IncidenceCurve::convex_on_branch: {
      double A = v[IH_A], B = v[IH_B], C = v[IH_C], D = v[IH_D];
      double ab = A + B;
      double q = ab * y * y + (B * C + D) * y + C * D;
      double cubic = ab * ab * y * y * y + 3.0 * C * ab * ab * y * y +
                     3.0 * ab * B * C * C * y + (B * B * C - A * D) * C * C;
      return -2.0 * D * cubic / (q * q * q);
    }
  }
  return 0;
}

ShapeReport shape_classify(IncidenceCurve c, const ParameterSet& p, double fixed_host,
                           double grid_max, std::optional<double> ray_slope) {
  ShapeReport rep;
  rep.grid_max = grid_max;
  rep.ray_slope = ray_slope.value_or(default_ray_slope(c, p));
  rep.vanishes_at_origin = incidence_value(c, p, fixed_host, 0.0) == 0.0;

  const int n = 2048;
  const double lo = 1e-6;
  double ratio = std::pow(grid_max / lo, 1.0 / (n - 1));
  bool mono = true, any_pos = false, any_neg = false;
  double first_flip_a = 0, first_flip_b = 0;
  int flips = 0;
  double y = lo;
  double prev_d2 = incidence_d2(c, p, fixed_host, y);
  for (int i = 0; i < n; ++i, y *= ratio) {
    if (incidence_d1(c, p, fixed_host, y) <= 0.0) mono = false;
    double d2 = incidence_d2(c, p, fixed_host, y);
    if (d2 > 0.0) any_pos = true;
    if (d2 < 0.0) any_neg = true;
    if (i > 0 && d2 != 0.0 && prev_d2 != 0.0 && std::signbit(d2) != std::signbit(prev_d2)) {
      if (flips == 0) {
        first_flip_a = y / ratio;
        first_flip_b = y;
      }
      ++flips;
    }
    prev_d2 = d2;
  }
  rep.monotone_increasing = mono;
  if (any_pos && any_neg && flips >= 1) {
    rep.concavity = Concavity::convex_concave;
    double a = first_flip_a, b = first_flip_b;
    double fa = incidence_d2(c, p, fixed_host, a);
    while (b - a > 1e-8) {
      double mid = 0.5 * (a + b);
      double fm = incidence_d2(c, p, fixed_host, mid);
      if (fm == 0.0) {
        a = b = mid;
        break;
      }
      if (std::signbit(fm) == std::signbit(fa)) {
        a = mid;
        fa = fm;
      } else {
        b = mid;
      }
    }
    rep.inflection = 0.5 * (a + b);
  } else {
    rep.concavity = any_neg ? Concavity::concave : Concavity::convex;
  }
  rep.ray_hits = ray_intersections(c, p, fixed_host, rep.ray_slope, grid_max);
  return rep;
}

std::vector<double> ray_intersections(IncidenceCurve c, const ParameterSet& p,
                                      double fixed_host, double slope, double grid_max) {
  std::vector<double> hits;
  auto diff = [&](double y) { return incidence_value(c, p, fixed_host, y) - slope * y; };
  const int n = 4096;
  const double lo = 1e-7;
  double ratio = std::pow(grid_max / lo, 1.0 / (n - 1));
  double y = lo, fp = diff(y);
  for (int i = 1; i < n; ++i) {
    double yn = y * ratio;
    double fn = diff(yn);
    if (fp != 0.0 && std::signbit(fp) != std::signbit(fn)) {
      double a = y, b = yn, fa = fp;
      for (int it = 0; it < 200 && b - a > 1e-15 * b; ++it) {
        double mid = 0.5 * (a + b);
        double fm = diff(mid);
        if (fm == 0.0) {
          a = b = mid;
          break;
        }
        if (std::signbit(fm) == std::signbit(fa)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      double root = 0.5 * (a + b);
      double scale = std::max({1.0, std::fabs(incidence_value(c, p, fixed_host, root)),
                               std::fabs(slope * root)});
      if (std::fabs(diff(root)) < 1e-10 * scale) hits.push_back(root);
    }
    y = yn;
    fp = fn;
  }
  return hits;
}

}  // namespace bifurc
