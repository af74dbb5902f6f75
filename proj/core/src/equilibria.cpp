#include "bifurc/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bifurc/detail/kernels.hpp"
#include "bifurc/errors.hpp"

namespace bifurc {

using detail::QuadCoeffs;

namespace {

constexpr double kDoubleRootRel = 1e-9;  // |disc| below this (relative) is a fold

double quad_scale(double a2, double a1, double a0) {
  return std::max({a1 * a1, std::fabs(4.0 * a2 * a0), 1e-300});
}

}  // namespace

QuadraticBranch solve_quadratic(double a2, double a1, double a0) {
  QuadraticBranch q;
  q.a2 = a2;
  q.a1 = a1;
  q.a0 = a0;
  q.discriminant = a1 * a1 - 4.0 * a2 * a0;
  double scale = quad_scale(a2, a1, a0);
  if (std::fabs(q.discriminant) <= kDoubleRootRel * scale) {
    q.n_roots = 1;
    q.is_double = true;
    q.roots[0] = -a1 / (2.0 * a2);
    return q;
  }
  if (q.discriminant < 0.0) {
    q.n_roots = 0;
    return q;
  }
  // Larger-magnitude root first, companion via a0/(a2*r) to dodge
  // cancellation near folds.
  double s = std::sqrt(q.discriminant);
  double qq = -0.5 * (a1 + std::copysign(s, a1));
  double r1 = qq / a2;
  double r2 = (qq != 0.0) ? a0 / qq : -a1 / a2 - r1;
  q.roots = {std::min(r1, r2), std::max(r1, r2)};
  q.n_roots = 2;
  return q;
}

std::pair<EquilibriumPoint, double> uninfected_equilibrium(const ParameterSet& p) {
  using namespace detail;
  const double* v = p.values().data();
  EquilibriumPoint e;
  e.branch = BranchTag::uninfected;
  double threshold = 0.0;
  switch (p.model()) {
    case ModelId::sir_concave: {
      e.state = State(v[SIR_LAMBDA] / v[SIR_D], 0.0);
      double m = v[SIR_D] + v[SIR_GAMMA] + v[SIR_EPS];
      threshold = v[SIR_BETA] * v[SIR_LAMBDA] / (m * v[SIR_D]);
      break;
    }
    case ModelId::sir_treatment: {
      e.state = State(v[SIR_LAMBDA] / v[SIR_D], 0.0);
      double m = v[SIR_D] + v[SIR_GAMMA] + v[SIR_EPS] + v[SIR_ALPHA] / v[SIR_OMEGA];
      threshold = v[SIR_BETA] * v[SIR_LAMBDA] / (m * v[SIR_D]);
      break;
    }
    case ModelId::inhost_convex: {
      e.state = State(1.0 / v[IH_D], 0.0);
      threshold = v[IH_B] / v[IH_D];
      break;
    }
    case ModelId::autoimmune_2d: {
      e.state = State(0.0, 0.0);
      threshold = compound_params(p).first;
      break;
    }
    case ModelId::autoimmune_3d: {
      e.state = State(0.0, 0.0, 0.0);
      threshold = compound_params(p).first;
      break;
    }
  }
  e.feasible = e.state.feasible();
  return {e, threshold};
}

QuadraticBranch infected_quadratic(const ParameterSet& p) {
  QuadCoeffs<double> c = detail::quad_coeffs(p.model(), p.values().data());
  return solve_quadratic(c.a2, c.a1, c.a0);
}

State lift_root(const ParameterSet& p, double y) {
  using namespace detail;
  const double* v = p.values().data();
  // Guard the lift denominators that can vanish for out-of-orthant roots.
  switch (p.model()) {
    case ModelId::sir_concave:
    case ModelId::sir_treatment: {
      double den = (v[SIR_D] * v[SIR_K] + v[SIR_BETA]) * y + v[SIR_D];
      if (den == 0.0)
        throw DomainError("branch lift singular at root I = " + std::to_string(y));
      break;
    }
    case ModelId::inhost_convex: {
      double den = (v[IH_A] + v[IH_B]) * y + v[IH_B] * v[IH_C];
      if (den == 0.0)
        throw DomainError("branch lift singular at root Y = " + std::to_string(y));
      break;
    }
    default: break;
  }
  State x = State::zeros(dimension(p.model()));
  detail::lift_state(p.model(), v, y, x.data());
  if (!x.finite())
    throw DomainError("branch lift overflow at root " + std::to_string(y));
  return x;
}

std::vector<EquilibriumPoint> infected_equilibria(const ParameterSet& p) {
  QuadraticBranch q = infected_quadratic(p);
  std::vector<EquilibriumPoint> out;
  for (int i = 0; i < q.n_roots; ++i) {
    double y = q.roots[i];
    // One Newton polish on the quadratic; harmless for exact roots, tightens
    // the residual when the discriminant is small.
    double fy = 2.0 * q.a2 * y + q.a1;
    if (std::fabs(fy) > 1e-300 && !q.is_double) {
      double f = (q.a2 * y + q.a1) * y + q.a0;
      y -= f / fy;
    }
    EquilibriumPoint e;
    e.state = lift_root(p, y);
    e.branch = q.is_double ? BranchTag::double_root
               : i == 0    ? BranchTag::infected_lower
                           : BranchTag::infected_upper;
    e.feasible = e.state.feasible();

    State r = rhs(p, e.state);
    double tol = 1e-9 * (1.0 + e.state.inf_norm());
    if (r.inf_norm() >= tol)
      throw NumericalError("equilibrium residual " + std::to_string(r.inf_norm()) +
                               " exceeds tolerance at root " + std::to_string(y),
                           y);
    out.push_back(e);
  }
  return out;
}

double transcritical_threshold(const ParameterSet& p) {
  using namespace detail;
  const double* v = p.values().data();
  switch (p.model()) {
    case ModelId::sir_concave:
      return (v[SIR_D] + v[SIR_GAMMA] + v[SIR_EPS]) * v[SIR_D] / v[SIR_BETA];
    case ModelId::sir_treatment:
      return (v[SIR_D] + v[SIR_GAMMA] + v[SIR_EPS] + v[SIR_ALPHA] / v[SIR_OMEGA]) *
             v[SIR_D] / v[SIR_BETA];
    case ModelId::inhost_convex: return v[IH_D];
    case ModelId::autoimmune_2d:
    case ModelId::autoimmune_3d:
      return (v[AU_B1] + v[AU_MUA]) * (v[AU_V] + v[AU_MUG]) * v[AU_MUE] /
             (v[AU_F] * v[AU_V] * v[AU_GAMMA]);
  }
  return 0.0;
}

namespace {

double discriminant_at(const ParameterSet& p, int idx, double value) {
  std::vector<double> v(p.values().begin(), p.values().end());
  v[static_cast<std::size_t>(idx)] = value;
  QuadCoeffs<double> c = detail::quad_coeffs(p.model(), v.data());
  return c.a1 * c.a1 - 4.0 * c.a2 * c.a0;
}

State vertex_state(const ParameterSet& p, int idx, double value) {
  std::vector<double> v(p.values().begin(), p.values().end());
  v[static_cast<std::size_t>(idx)] = value;
  QuadCoeffs<double> c = detail::quad_coeffs(p.model(), v.data());
  double y = -c.a1 / (2.0 * c.a2);
  State x = State::zeros(dimension(p.model()));
  detail::lift_state(p.model(), v.data(), y, x.data());
  return x;
}

}  // namespace

TurningPoint turning_point(const ParameterSet& p) {
  using namespace detail;
  const int idx = bif_param_index(p.model());
  TurningPoint t;

  if (p.model() == ModelId::inhost_convex) {
    // Closed form: the fold adjacent to the transcritical threshold.
    const double* v = p.values().data();
    double bt = (-v[IH_A] + v[IH_D] + 2.0 * std::sqrt(v[IH_A] * v[IH_C] * v[IH_D])) /
                (v[IH_C] + 1.0);
    t.exists = true;
    t.param_value = bt;
    t.state = vertex_state(p, idx, bt);
    return t;
  }

  // Sign scan of the discriminant on a geometric grid up to 1e4 times the
  // transcritical threshold, then bisection. The largest root is the fold of
  // the backward-bent branch; smaller roots belong to remote branches.
  double ps = transcritical_threshold(p);
  const int n = 512;
  double lo = 1e-6 * ps, hi = 1e4 * ps;
  double ratio = std::pow(hi / lo, 1.0 / (n - 1));
  double prev_x = lo, prev_d = discriminant_at(p, idx, lo);
  double root = 0.0;
  bool found = false;
  double x = lo;
  for (int i = 1; i < n; ++i) {
    x *= ratio;
    double d = discriminant_at(p, idx, x);
    if (std::isfinite(prev_d) && std::isfinite(d) && prev_d != 0.0 &&
        std::signbit(d) != std::signbit(prev_d)) {
      double a = prev_x, b = x;
      double fa = prev_d;
      for (int it = 0; it < 200 && (b - a) > 1e-14 * std::fabs(b); ++it) {
        double mm = 0.5 * (a + b);
        double fm = discriminant_at(p, idx, mm);
        if (fm == 0.0) {
          a = b = mm;
          break;
        }
        if (std::signbit(fm) == std::signbit(fa)) {
          a = mm;
          fa = fm;
        } else {
          b = mm;
        }
      }
      root = 0.5 * (a + b);
      found = true;  // keep scanning; the last (largest) root wins
    }
    prev_x = x;
    prev_d = d;
  }
  if (!found) return t;
  t.exists = true;
  t.param_value = root;
  t.state = vertex_state(p, idx, root);
  return t;
}

BifShape classify_bifurcation_shape(const ParameterSet& p) {
  TurningPoint t = turning_point(p);
  if (t.exists) {
    double y = t.state[infected_index(p.model())];
    return y > 0.0 ? BifShape::backward_positive : BifShape::backward_negative;
  }
  double ps = transcritical_threshold(p);
  return std::isfinite(ps) && ps > 0.0 ? BifShape::forward : BifShape::none;
}

}  // namespace bifurc
