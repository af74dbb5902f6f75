#pragma once

#include <optional>

#include "bifurc/models.hpp"
#include "bifurc/scan.hpp"

namespace bifurc {

enum class Criticality { supercritical, subcritical };
enum class CycleStability { stable, unstable };

// Coefficients of the radial normal form r' = d*mu*r + a*r^3 at a planar
// Hopf point, mu being the designated parameter minus its Hopf value. The
// class letter follows the usual four-quadrant (sign d, sign a) scheme:
//   (a) d>0,a>0 subcritical/unstable cycle, (b) d>0,a<0 supercritical/stable,
//   (c) d<0,a>0 subcritical/unstable,       (d) d<0,a<0 supercritical/stable.
struct HopfData {
  double hopf_param = 0;  // mu = param - hopf_param
  double d = 0;
  double a = 0;
  double omega_c = 0;
  char table_class = '?';
  Criticality criticality = Criticality::supercritical;
  CycleStability cycle_stability = CycleStability::stable;
  bool equilibrium_stable_mu_neg = false;
  bool equilibrium_stable_mu_pos = false;
};

// Linear coordinate frame at a planar Hopf point: u = center + P z puts the
// linearization into (x' = -w y, y' = w x). The eigenvector is scaled so the
// first state component oscillates with unit amplitude at r = 1, which makes
// the normal-form radius directly comparable with simulated time series.
struct HopfFrame {
  State center;
  double omega = 0;
  double P[2][2]{};
  double Pinv[2][2]{};
};
HopfFrame hopf_frame(const ParameterSet& p, const BifurcationPoint& hopf);

// d(Re lambda)/d(mu) along the equilibrium branch, by implicit
// differentiation of the branch quadratic; cross-checked internally against
// a central finite difference (1e-4 relative agreement required). Throws
// DegeneracyError when the Hopf point sits on a fold.
double transversality_d(const ParameterSet& p, const BifurcationPoint& hopf);

// Cubic coefficient of the radial normal form, from exact third-order
// expansion of the vector field in the canonical frame. Throws
// DegeneracyError when |a| < 1e-14.
double lyapunov_a(const ParameterSet& p, const BifurcationPoint& hopf);

// Exact sign-quadrant classification; throws DegeneracyError on zero input.
HopfData classify_hopf(double d, double a);

// Full normal form at a validated planar Hopf point.
HopfData hopf_normal_form(const ParameterSet& p, const BifurcationPoint& hopf);

// sqrt(-d*mu/a) when the cycle exists on that side of mu = 0.
std::optional<double> amplitude_estimate(const HopfData& h, double mu);

enum class ProbeResult { supercritical, subcritical, undecided };

// Criticality by simulation: integrate small perturbations on both sides of
// the Hopf parameter and test whether a bounded cycle appears around the
// unstable equilibrium. Works for any model dimension; it is the only
// criticality route for the 3-d model.
ProbeResult simulation_probe(const ParameterSet& p, const BifurcationPoint& hopf);

}  // namespace bifurc
