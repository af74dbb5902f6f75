#include "bifurc/normal_form.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "bifurc/detail/jet.hpp"
#include "bifurc/detail/kernels.hpp"
#include "bifurc/errors.hpp"
#include "bifurc/simulate.hpp"
#include "bifurc/spectral.hpp"

namespace bifurc {

using namespace detail;
using std::complex;

namespace {

void require_planar(const ParameterSet& p) {
  if (dimension(p.model()) != 2)
    throw std::invalid_argument("normal-form coefficients are planar-only");
}

// Negated trace along the branch as a function of the branch variable, with
// the designated parameter eliminated. Shared by the analytic and finite
// difference transversality routes.
double branch_trace_t(const ParameterSet& p, double y, double* param_out = nullptr) {
  ModelId m = p.model();
  double pv = branch_param(m, p.values().data(), y);
  std::vector<double> vv(p.values().begin(), p.values().end());
  vv[static_cast<std::size_t>(bif_param_index(m))] = pv;
  double x[3];
  lift_state(m, vv.data(), y, x);
  double J[9] = {};
  jac_any(m, vv.data(), x, J);
  if (param_out) *param_out = pv;
  return -(J[0] + J[3]);
}

}  // namespace

double transversality_d(const ParameterSet& p, const BifurcationPoint& hopf) {
  require_planar(p);
  ModelId m = p.model();
  const int idx = bif_param_index(m);
  const double y_h = hopf.state[infected_index(m)];

  // Branch derivative dy/dp from the quadratic; singular exactly at a fold.
  QuadCoeffs<double> c = quad_coeffs(m, p.with(idx, hopf.param_value).values().data());
  double f_y = 2.0 * c.a2 * y_h + c.a1;
  double fy_scale = std::max({std::fabs(2.0 * c.a2 * y_h), std::fabs(c.a1), 1e-300});
  if (std::fabs(f_y) < 1e-10 * fy_scale)
    throw DegeneracyError("fold coincides with the Hopf point; branch derivative singular");

  // Analytic route: dual numbers through the eliminated-parameter path give
  // dT/dy; dp/dy comes from the same dual evaluation of the branch relation.
  std::vector<Dual> dp(p.values().begin(), p.values().end());
  Dual dy(y_h, 1.0);
  Dual pv = branch_param(m, dp.data(), dy);
  dp[static_cast<std::size_t>(idx)] = pv;
  Dual x[3];
  lift_state(m, dp.data(), dy, x);
  Dual J[9];
  jac_any(m, dp.data(), x, J);
  Dual T = 0.0 - (J[0] + J[3]);
  if (!std::isfinite(pv.d) || pv.d == 0.0)
    throw DegeneracyError("branch relation stationary at the Hopf point");
  double d_analytic = -0.5 * T.d / pv.d;

  // Central finite difference in the branch variable.
  double h = 1e-5 * std::max(1.0, std::fabs(y_h));
  double pp, pm;
  double tp = branch_trace_t(p, y_h + h, &pp);
  double tm = branch_trace_t(p, y_h - h, &pm);
  double d_fd = -0.5 * (tp - tm) / (pp - pm);
  if (std::fabs(d_analytic - d_fd) > 1e-4 * std::max(std::fabs(d_analytic), 1e-12))
    throw NumericalError("transversality cross-check failed: analytic " +
                             std::to_string(d_analytic) + " vs finite-difference " +
                             std::to_string(d_fd),
                         y_h);
  return d_analytic;
}

HopfFrame hopf_frame(const ParameterSet& p, const BifurcationPoint& hopf) {
  require_planar(p);
  ParameterSet ph = p.with(bif_param_index(p.model()), hopf.param_value);
  Matrix J = jacobian(ph, hopf.state);
  double delta = J.det();
  if (!(delta > 0.0))
    throw ContractViolation("hopf_frame needs a positive determinant (got " +
                            std::to_string(delta) + ")");
  double omega = std::sqrt(delta);

  // Eigenvector for +i*omega, scaled so its first component is 1; then
  // u = center + x*Im(v) + y*Re(v) has first component center + r*sin(...),
  // i.e. the radius measures the first state variable's swing. Fall back to
  // the second component if the first row is degenerate.
  complex<double> v0, v1;
  const complex<double> iw(0.0, omega);
  if (std::fabs(J(0, 1)) >= 1e-12 * (1.0 + std::fabs(J(1, 0)))) {
    v0 = 1.0;
    v1 = (iw - J(0, 0)) / J(0, 1);
  } else {
    v0 = (iw - J(1, 1)) / J(1, 0);
    v1 = 1.0;
    complex<double> s = v0;  // renormalize to unit first component if possible
    if (std::abs(s) > 1e-12) {
      v0 = 1.0;
      v1 = v1 / s;
    }
  }
  HopfFrame fr;
  fr.center = hopf.state;
  fr.omega = omega;
  fr.P[0][0] = v0.imag();
  fr.P[0][1] = v0.real();
  fr.P[1][0] = v1.imag();
  fr.P[1][1] = v1.real();
  double det = fr.P[0][0] * fr.P[1][1] - fr.P[0][1] * fr.P[1][0];
  if (det == 0.0) throw NumericalError("Hopf frame transformation singular");
  fr.Pinv[0][0] = fr.P[1][1] / det;
  fr.Pinv[0][1] = -fr.P[0][1] / det;
  fr.Pinv[1][0] = -fr.P[1][0] / det;
  fr.Pinv[1][1] = fr.P[0][0] / det;
  return fr;
}

double lyapunov_a(const ParameterSet& p, const BifurcationPoint& hopf) {
  require_planar(p);
  HopfFrame fr = hopf_frame(p, hopf);
  ParameterSet ph = p.with(bif_param_index(p.model()), hopf.param_value);

  // Third-order jets of the vector field in the canonical frame.
  std::vector<Jet2> jp;
  for (double v : ph.values()) jp.push_back(Jet2::constant(v));
  Jet2 jx = Jet2::variable(0, 0.0);
  Jet2 jy = Jet2::variable(1, 0.0);
  Jet2 u[2];
  u[0] = fr.center[0] + fr.P[0][0] * jx + fr.P[0][1] * jy;
  u[1] = fr.center[1] + fr.P[1][0] * jx + fr.P[1][1] * jy;
  Jet2 f[2];
  rhs_any(p.model(), jp.data(), u, f);
  Jet2 F = fr.Pinv[0][0] * f[0] + fr.Pinv[0][1] * f[1];
  Jet2 G = fr.Pinv[1][0] * f[0] + fr.Pinv[1][1] * f[1];

  // The linear block must be (-w y, w x); anything else means the input was
  // not a Hopf point of this parameter set.
  double w = fr.omega;
  double lin_err = std::max({std::fabs(F.c[1][0]), std::fabs(F.c[0][1] + w),
                             std::fabs(G.c[1][0] - w), std::fabs(G.c[0][1])});
  if (lin_err > 1e-6 * std::max(1.0, w))
    throw ContractViolation("state is not a Hopf equilibrium of the given parameters");

  double fxx = 2 * F.c[2][0], fxy = F.c[1][1], fyy = 2 * F.c[0][2];
  double gxx = 2 * G.c[2][0], gxy = G.c[1][1], gyy = 2 * G.c[0][2];
  double fxxx = 6 * F.c[3][0], fxyy = 2 * F.c[1][2];
  double gxxy = 2 * G.c[2][1], gyyy = 6 * G.c[0][3];

  double a = (fxxx + fxyy + gxxy + gyyy) / 16.0 +
             (fxy * (fxx + fyy) - gxy * (gxx + gyy) - fxx * gxx + fyy * gyy) / (16.0 * w);
  if (std::fabs(a) < 1e-14)
    throw DegeneracyError("cubic normal-form coefficient vanishes (degenerate Hopf)");
  return a;
}

HopfData classify_hopf(double d, double a) {
  if (d == 0.0 || a == 0.0)
    throw DegeneracyError("classify_hopf needs nonzero d and a");
  HopfData h;
  h.d = d;
  h.a = a;
  if (d > 0 && a > 0) h.table_class = 'a';
  if (d > 0 && a < 0) h.table_class = 'b';
  if (d < 0 && a > 0) h.table_class = 'c';
  if (d < 0 && a < 0) h.table_class = 'd';
  h.criticality = a < 0 ? Criticality::supercritical : Criticality::subcritical;
  h.cycle_stability = a < 0 ? CycleStability::stable : CycleStability::unstable;
  // Re(lambda) = d*mu near the point: stable where d*mu < 0.
  h.equilibrium_stable_mu_neg = d > 0;
  h.equilibrium_stable_mu_pos = d < 0;
  return h;
}

HopfData hopf_normal_form(const ParameterSet& p, const BifurcationPoint& hopf) {
  if (hopf.kind != BifKind::hopf)
    throw ContractViolation("hopf_normal_form needs a validated Hopf point");
  double d = transversality_d(p, hopf);
  double a = lyapunov_a(p, hopf);
  HopfData h = classify_hopf(d, a);
  h.hopf_param = hopf.param_value;
  h.omega_c = hopf.omega_c.value_or(0.0);
  return h;
}

std::optional<double> amplitude_estimate(const HopfData& h, double mu) {
  double r2 = -h.d * mu / h.a;
  if (r2 > 0.0) return std::sqrt(r2);
  return std::nullopt;
}

namespace {

struct ProbeRun {
  bool cycling = false;   // stationary oscillation that encircles the equilibrium
  bool departed = false;  // settled away from the equilibrium, oscillation gone
  double amplitude = 0;
};

ProbeRun probe_run(const ParameterSet& pv, const State& eq, double pert_rel, double rate) {
  ProbeRun out;
  int comp = infected_index(pv.model());
  State ic = eq;
  double scale = std::max(1.0, eq.inf_norm());
  for (int i = 0; i < ic.dim(); ++i)
    ic[i] += pert_rel * std::max(0.05 * scale, std::fabs(eq[i]));

  IntegratorConfig cfg;
  cfg.t_end = std::clamp(25.0 / std::max(rate, 1e-4), 2000.0, 60000.0);
  Trajectory tr(ic.dim());
  try {
    tr = integrate(pv, ic, cfg);
  } catch (const NumericalError&) {
    out.departed = true;  // blow-up counts as leaving the neighbourhood
    return out;
  }

  std::size_t n = tr.size();
  auto index_at = [&](double tfrac) {
    double t0 = tr.time(n - 1) * tfrac;
    std::size_t i = 0;
    while (i + 1 < n && tr.time(i) < t0) ++i;
    return i;
  };
  auto window_amp = [&](std::size_t a, std::size_t b, double& lo, double& hi) {
    lo = std::numeric_limits<double>::infinity();
    hi = -lo;
    for (std::size_t i = a; i < b; ++i) {
      lo = std::min(lo, tr.component(i, comp));
      hi = std::max(hi, tr.component(i, comp));
    }
  };
  std::size_t i_mid = index_at(0.5), i_late = index_at(0.75);
  double lo_mid, hi_mid, lo_late, hi_late;
  window_amp(i_mid, i_late, lo_mid, hi_mid);
  window_amp(i_late, n, lo_late, hi_late);
  out.amplitude = 0.5 * (hi_late - lo_late);
  double amp_mid = 0.5 * (hi_mid - lo_mid);
  bool stationary = std::fabs(out.amplitude - amp_mid) <=
                    0.25 * std::max(out.amplitude, 1e-8 * scale);
  bool encircles = lo_late < eq[comp] && eq[comp] < hi_late;
  out.cycling = encircles && stationary && out.amplitude > 1e-7 * scale;
  if (!out.cycling) {
    double dev = 0.0;
    for (std::size_t i = i_late; i < n; ++i) {
      State s = tr.state(i);
      for (int k = 0; k < s.dim(); ++k)
        dev = std::max(dev, std::fabs(s[k] - eq[k]) / std::max(1.0, std::fabs(eq[k])));
    }
    out.departed = dev > 0.2 && out.amplitude < 0.05 * std::max(1.0, std::fabs(eq[comp]));
  }
  return out;
}

}  // namespace

ProbeResult simulation_probe(const ParameterSet& p, const BifurcationPoint& hopf) {
  ModelId m = p.model();
  const int idx = bif_param_index(m);
  const int comp = infected_index(m);
  const double y_h = hopf.state[comp];

  // Pick a parameter offset large enough that the linear growth rate is
  // resolvable within the probe budget, then identify the unstable side. On
  // that side a small and a medium perturbation must agree on a stationary
  // bounded cycle (supercritical) or on departure to another attractor
  // (subcritical).
  const double offsets[] = {1e-3, 3e-3, 1e-2, 3e-2, 0.1};
  for (int side : {+1, -1}) {
    for (double rel : offsets) {
      double pv = hopf.param_value * (1.0 + side * rel);
      if (pv <= 0.0) continue;
      ParameterSet pp = p.with(idx, pv);
      QuadraticBranch q = infected_quadratic(pp);
      if (q.n_roots == 0) continue;
      double y = std::fabs(q.roots[0] - y_h) < std::fabs(q.roots[q.n_roots - 1] - y_h)
                     ? q.roots[0]
                     : q.roots[q.n_roots - 1];
      State eq;
      try {
        eq = lift_root(pp, y);
      } catch (const DomainError&) {
        continue;
      }
      auto rep = stability(pp, eq);
      double max_re = -std::numeric_limits<double>::infinity();
      for (auto z : rep.eigenvalues) max_re = std::max(max_re, z.real());
      if (max_re < 5e-4) continue;  // not (resolvably) unstable at this offset
      if (rel == 0.1 || max_re >= 5e-3) {
        ProbeRun r1 = probe_run(pp, eq, 1e-3, max_re);
        ProbeRun r2 = probe_run(pp, eq, 1e-2, max_re);
        double ratio = (r1.amplitude > 0 && r2.amplitude > 0)
                           ? std::max(r1.amplitude, r2.amplitude) /
                                 std::min(r1.amplitude, r2.amplitude)
                           : std::numeric_limits<double>::infinity();
        if (r1.cycling && r2.cycling && ratio < 2.0) return ProbeResult::supercritical;
        if (r1.departed || r2.departed) return ProbeResult::subcritical;
        break;  // this side answered nothing definitive; try the other side
      }
    }
  }
  return ProbeResult::undecided;
}

}  // namespace bifurc
