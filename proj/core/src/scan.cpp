#include "bifurc/scan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bifurc/detail/jet.hpp"
#include "bifurc/detail/kernels.hpp"
#include "bifurc/errors.hpp"

namespace bifurc {

using namespace detail;

BifurcationPoint find_transcritical(const ParameterSet& p) {
  double threshold = transcritical_threshold(p);
  ParameterSet pc = p.with(bif_param_index(p.model()), threshold);
  BifurcationPoint b;
  b.kind = BifKind::transcritical;
  b.param_value = threshold;
  b.state = uninfected_equilibrium(pc).first.state;
  return b;
}

namespace {

// One point of the infected branch with the designated parameter eliminated.
// test is the Hopf test function: the negated trace for planar models,
// c2*c1 - c0 for the 3-d model. valid is false off the admissible branch
// (non-positive parameter, singular lift).
struct BranchEval {
  double test = std::numeric_limits<double>::quiet_NaN();
  double param = 0;
  State state;
  CharPoly cp;
  bool valid = false;
};

BranchEval eval_branch(const ParameterSet& p, double y) {
  BranchEval r;
  ModelId m = p.model();
  double pv = branch_param(m, p.values().data(), y);
  if (!std::isfinite(pv) || pv <= 0.0) return r;
  std::vector<double> vv(p.values().begin(), p.values().end());
  vv[static_cast<std::size_t>(bif_param_index(m))] = pv;
  State x = State::zeros(dimension(m));
  lift_state(m, vv.data(), y, x.data());
  if (!x.finite()) return r;
  double J[9];
  jac_any(m, vv.data(), x.data(), J);
  int d = dimension(m);
  for (int i = 0; i < d * d; ++i)
    if (!std::isfinite(J[i])) return r;
  r.param = pv;
  r.state = x;
  if (d == 2) {
    r.cp.degree = 2;
    r.cp.c = {J[0] * J[3] - J[1] * J[2], -(J[0] + J[3]), 0.0};
    r.test = r.cp.c[1];
  } else {
    Matrix M;
    M.dim = 3;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) M(i, j) = J[3 * i + j];
    r.cp.degree = 3;
    r.cp.c = {-M.det(), M.minor_sum(), -M.trace()};
    r.test = r.cp.c[2] * r.cp.c[1] - r.cp.c[0];
  }
  r.valid = std::isfinite(r.test);
  return r;
}

// d(test)/dy along the branch by dual-number evaluation of the same path.
double branch_test_derivative(const ParameterSet& p, double y) {
  ModelId m = p.model();
  std::vector<Dual> dp(p.values().begin(), p.values().end());
  Dual dy(y, 1.0);
  Dual pv = branch_param(m, dp.data(), dy);
  dp[static_cast<std::size_t>(bif_param_index(m))] = pv;
  Dual x[3];
  lift_state(m, dp.data(), dy, x);
  Dual J[9];
  jac_any(m, dp.data(), x, J);
  if (dimension(m) == 2) {
    Dual test = 0.0 - (J[0] + J[3]);
    return test.d;
  }
  Dual tr = J[0] + J[4] + J[8];
  Dual minors = J[0] * J[4] - J[1] * J[3] + J[0] * J[8] - J[2] * J[6] +
                J[4] * J[8] - J[5] * J[7];
  Dual det = J[0] * (J[4] * J[8] - J[5] * J[7]) - J[1] * (J[3] * J[8] - J[5] * J[6]) +
             J[2] * (J[3] * J[7] - J[4] * J[6]);
  Dual test = (0.0 - tr) * minors + det;  // c2*c1 - c0
  return test.d;
}

BifurcationPoint classify_candidate(const BranchEval& e) {
  BifurcationPoint b;
  b.param_value = e.param;
  b.state = e.state;
  constexpr double kMargin = 1e-12;  // strict positivity margin
  double osc = e.cp.degree == 2 ? e.cp.delta() : e.cp.c[1];
  if (osc > kMargin) {
    b.kind = BifKind::hopf;
    b.omega_c = std::sqrt(osc);
  } else {
    b.kind = BifKind::neutral_saddle;
  }
  return b;
}

// Scan test-function sign changes over a geometric grid of |y| values on one
// side of the branch, refine each bracket, and classify. Sign changes across
// a pole of the branch relation do not converge to a zero and are dropped.
void scan_side(const ParameterSet& p, int sign, double y_max, int grid,
               std::vector<BifurcationPoint>& out) {
  const double lo = 1e-6;
  double ratio = std::pow(y_max / lo, 1.0 / (grid - 1));
  double mag = lo;
  BranchEval prev = eval_branch(p, sign * mag);
  double prev_y = sign * mag;
  for (int i = 1; i < grid; ++i) {
    mag *= ratio;
    double cur_y = sign * mag;
    BranchEval cur = eval_branch(p, cur_y);
    if (prev.valid && cur.valid && prev.test != 0.0 &&
        std::signbit(prev.test) != std::signbit(cur.test)) {
      double a = std::min(prev_y, cur_y), b = std::max(prev_y, cur_y);
      double fa = eval_branch(p, a).test;
      double scale0 = std::max(std::fabs(prev.test), std::fabs(cur.test));
      bool bad = false;
      for (int it = 0; it < 110 && (b - a) > 1e-15 * std::max(1.0, std::fabs(a)); ++it) {
        double mid = 0.5 * (a + b);
        BranchEval me = eval_branch(p, mid);
        if (!me.valid) {
          bad = true;
          break;
        }
        if (me.test == 0.0) {
          a = b = mid;
          break;
        }
        if (std::signbit(me.test) == std::signbit(fa)) {
          a = mid;
          fa = me.test;
        } else {
          b = mid;
        }
      }
      if (!bad) {
        double root = 0.5 * (a + b);
        BranchEval fe = eval_branch(p, root);
        // Newton polish down to the requested residual.
        bool converged = false;
        for (int it = 0; it < 100 && fe.valid; ++it) {
          double cscale = 1.0 + std::fabs(fe.cp.c[0]) + std::fabs(fe.cp.c[1]) +
                          std::fabs(fe.cp.c[2]);
          if (std::fabs(fe.test) <= 1e-11 * cscale) {
            converged = true;
            break;
          }
          double der = branch_test_derivative(p, root);
          if (!std::isfinite(der) || der == 0.0) break;
          root -= fe.test / der;
          fe = eval_branch(p, root);
        }
        if (fe.valid && converged) {
          out.push_back(classify_candidate(fe));
        } else if (fe.valid && std::fabs(fe.test) < 1e-3 * scale0) {
          // A genuine zero we failed to polish: surface it rather than
          // silently dropping a bifurcation point.
          throw NumericalError("Hopf refinement failed to converge in bracket [" +
                                   std::to_string(std::min(prev_y, cur_y)) + ", " +
                                   std::to_string(std::max(prev_y, cur_y)) + "]",
                               root);
        }
      }
    }
    prev = cur;
    prev_y = cur_y;
  }
}

}  // namespace

std::vector<BifurcationPoint> find_hopf(const ParameterSet& p, const HopfSearchOptions& opts) {
  std::vector<BifurcationPoint> out;
  scan_side(p, +1, opts.state_max, opts.grid, out);
  if (!opts.feasible_only) scan_side(p, -1, opts.state_max, opts.grid, out);
  std::sort(out.begin(), out.end(), [](const BifurcationPoint& a, const BifurcationPoint& b) {
    return a.param_value < b.param_value;
  });
  return out;
}

BranchDiagram sweep_branch(const ParameterSet& p, double lo, double hi, int samples,
                           bool geometric, const HopfSearchOptions& opts) {
  if (hi < lo) std::swap(lo, hi);
  if (lo <= 0.0) throw std::invalid_argument("sweep interval must be positive");
  bool degenerate = lo == hi;
  if (!degenerate && samples < 2)
    throw std::invalid_argument("sweep needs at least 2 samples");

  BranchDiagram d;
  d.param_lo = lo;
  d.param_hi = hi;
  int idx = bif_param_index(p.model());
  int n = degenerate ? 1 : samples;
  for (int i = 0; i < n; ++i) {
    double v;
    if (degenerate)
      v = lo;
    else if (geometric)
      v = lo * std::pow(hi / lo, double(i) / (samples - 1));
    else
      v = lo + (hi - lo) * double(i) / (samples - 1);
    ParameterSet pv = p.with(idx, v);
    auto e0 = uninfected_equilibrium(pv).first;
    d.samples.push_back({v, e0, stability(pv, e0.state), std::nullopt});
    for (const EquilibriumPoint& e : infected_equilibria(pv))
      d.samples.push_back({v, e, stability(pv, e.state), std::nullopt});
  }

  auto add_point = [&](const BifurcationPoint& b, BranchTag tag) {
    if (b.param_value < lo || b.param_value > hi) return;
    d.bifurcations.push_back(b);
    ParameterSet pv = p.with(idx, b.param_value);
    EquilibriumPoint e{b.state, tag, b.state.feasible()};
    d.samples.push_back({b.param_value, e, stability(pv, b.state), b.kind});
  };
  add_point(find_transcritical(p), BranchTag::uninfected);
  TurningPoint tp = turning_point(p);
  if (tp.exists && tp.param_value > 0.0) {
    BifurcationPoint b;
    b.kind = BifKind::turning;
    b.param_value = tp.param_value;
    b.state = tp.state;
    add_point(b, BranchTag::double_root);
  }
  for (const BifurcationPoint& h : find_hopf(p, opts)) {
    QuadraticBranch q = infected_quadratic(p.with(idx, h.param_value));
    double vertex_y = -q.a1 / (2.0 * q.a2);
    BranchTag tag = h.state[infected_index(p.model())] >= vertex_y
                        ? BranchTag::infected_upper
                        : BranchTag::infected_lower;
    add_point(h, tag);
  }

  std::stable_sort(d.samples.begin(), d.samples.end(),
                   [](const BranchSample& a, const BranchSample& b) {
                     return a.param < b.param;
                   });
  std::sort(d.bifurcations.begin(), d.bifurcations.end(),
            [](const BifurcationPoint& a, const BifurcationPoint& b) {
              return a.param_value < b.param_value;
            });
  return d;
}

}  // namespace bifurc
