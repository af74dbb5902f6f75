#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "bifurc/models.hpp"

namespace bifurc {

// Monic characteristic polynomial, coefficients stored low to high:
//   degree 2: L^2 + c[1] L + c[0], with c[1] = -trace(J), c[0] = det(J)
//   degree 3: L^3 + c[2] L^2 + c[1] L + c[0]
// For planar polynomials the stability criterion is t() > 0 and delta() > 0.
struct CharPoly {
  int degree = 2;
  std::array<double, 3> c{};

  double t() const { return c[1]; }      // negated trace
  double delta() const { return c[0]; }  // determinant
};

enum class StabilityClass {
  stable_node,
  stable_focus,
  saddle,
  unstable_node,
  unstable_focus,
  nonhyperbolic,
};

struct StabilityReport {
  std::vector<std::complex<double>> eigenvalues;
  StabilityClass cls = StabilityClass::nonhyperbolic;
};

// Characteristic polynomial at an equilibrium. Throws ContractViolation when
// x is not an equilibrium of p (same residual test as the branch solvers).
CharPoly char_poly(const ParameterSet& p, const State& x);

// As char_poly but without the equilibrium check; for use on states that are
// equilibria by construction.
CharPoly char_poly_unchecked(const ParameterSet& p, const State& x);

// Roots to relative accuracy 1e-10, residual-validated.
std::vector<std::complex<double>> eigenvalues(const CharPoly& cp);

StabilityReport classify_stability(const CharPoly& cp);
StabilityReport stability(const ParameterSet& p, const State& x);

// Numerators of -trace(J) and det(J) on the infected branch of the convex
// in-host model, over the shared positive factor ((A+B)Y + BC)(Y + C).
double inhost_trace_num(const ParameterSet& p, double y);
double inhost_det_num(const ParameterSet& p, double y);

// Hopf-feasibility indicator: h1(I) for the treatment model, h2(Y) for the
// convex in-host model. A Hopf point on the branch requires h < 0 there.
// When eliminate_param is set (in-host model) the designated parameter is
// replaced by its on-branch value at each evaluation point, which is the
// form tabulated against the control parameter. The interval is the first
// sign-negative window of the indicator on (0, scan_max]; the upper end is
// +infinity when the indicator stays negative and its leading behaviour
// admits no further sign change.
struct HIndicator {
  double value = 0;
  std::optional<std::pair<double, double>> negativity;
};
HIndicator h_indicator(const ParameterSet& p, double infected_value,
                       bool eliminate_param = false, double scan_max = 1e3);

}  // namespace bifurc
