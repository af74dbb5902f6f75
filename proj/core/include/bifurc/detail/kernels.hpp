#pragma once

// Templated evaluation kernels shared by the public API, the bifurcation
// scanners, and the normal-form machinery. The scalar type S is double,
// Dual, or Jet2; every expression below is rational in the parameters and
// the state. No validation happens here: callers that sweep parameters
// through infeasible values (negative B along a fold, say) use these
// directly and filter afterwards.

#include <cstddef>

#include "bifurc/models.hpp"

namespace bifurc::detail {

// Packed parameter layout.
// sir_concave:   [Lambda, beta, k, d, gamma, epsilon]
// sir_treatment: [Lambda, beta, k, d, gamma, epsilon, alpha, omega]
// inhost_convex: [A, B, C, D]
// autoimmune_2d: [f, v, sigma1, b1, mu_A, pi1, beta, mu_n, mu_E, gamma, mu_G, lambda_E]
// autoimmune_3d: the twelve above plus [mu_d, c, d, xi]
enum SirIdx { SIR_LAMBDA = 0, SIR_BETA, SIR_K, SIR_D, SIR_GAMMA, SIR_EPS, SIR_ALPHA, SIR_OMEGA };
enum InhostIdx { IH_A = 0, IH_B, IH_C, IH_D };
enum AutoIdx {
  AU_F = 0, AU_V, AU_SIGMA1, AU_B1, AU_MUA, AU_PI1, AU_BETA, AU_MUN,
  AU_MUE, AU_GAMMA, AU_MUG, AU_LAMBDAE, AU_MUD, AU_C, AU_D, AU_XI
};

template <class S>
struct QuadCoeffs {
  S a2, a1, a0;  // a2*y^2 + a1*y + a0 = 0 along the infected branch
};

// ---- autoimmune compounds -------------------------------------------------

template <class S>
inline void autoimmune_compounds(const S* p, S& a, S& b) {
  a = p[AU_F] * p[AU_V] * p[AU_GAMMA] * p[AU_LAMBDAE] /
          (p[AU_MUE] * (p[AU_V] + p[AU_MUG])) -
      p[AU_B1] - p[AU_MUA];
  b = p[AU_PI1] * p[AU_LAMBDAE] / p[AU_MUE];
}

// ---- right-hand sides -----------------------------------------------------

template <class S>
inline void rhs_sir(bool treatment, const S* p, const S* x, S* out) {
  const S& s = x[0];
  const S& i = x[1];
  S inc = p[SIR_BETA] * s * i / (1.0 + p[SIR_K] * i);
  S removal = (p[SIR_D] + p[SIR_GAMMA] + p[SIR_EPS]) * i;
  out[0] = p[SIR_LAMBDA] - inc - p[SIR_D] * s;
  out[1] = inc - removal;
  if (treatment) out[1] = out[1] - p[SIR_ALPHA] * i / (p[SIR_OMEGA] + i);
}

template <class S>
inline void rhs_inhost(const S* p, const S* x, S* out) {
  const S& X = x[0];
  const S& Y = x[1];
  S inc = (p[IH_B] + p[IH_A] * Y / (Y + p[IH_C])) * X * Y;
  out[0] = 1.0 - p[IH_D] * X - inc;
  out[1] = inc - Y;
}

template <class S>
inline void rhs_autoimmune(bool three_d, const S* p, const S* x, S* out) {
  S a, b;
  autoimmune_compounds(p, a, b);
  const S& A = x[0];
  const S& Rn = x[1];
  if (!three_d) {
    out[0] = (a - p[AU_SIGMA1] * Rn) * A;
    out[1] = (b * A + p[AU_BETA]) * A - p[AU_MUN] * Rn;
  } else {
    const S& Rd = x[2];
    out[0] = (a - p[AU_SIGMA1] * (Rn + p[AU_D] * Rd)) * A;
    out[1] = (b * A + p[AU_BETA]) * A - (p[AU_MUN] + p[AU_XI]) * Rn;
    out[2] = p[AU_C] * p[AU_XI] * Rn - p[AU_MUD] * Rd;
  }
}

template <class S>
inline void rhs_any(ModelId m, const S* p, const S* x, S* out) {
  switch (m) {
    case ModelId::sir_concave: rhs_sir(false, p, x, out); break;
    case ModelId::sir_treatment: rhs_sir(true, p, x, out); break;
    case ModelId::inhost_convex: rhs_inhost(p, x, out); break;
    case ModelId::autoimmune_2d: rhs_autoimmune(false, p, x, out); break;
    case ModelId::autoimmune_3d: rhs_autoimmune(true, p, x, out); break;
  }
}

// ---- analytic Jacobians (row-major, dim x dim) -----------------------------

template <class S>
inline void jac_sir(bool treatment, const S* p, const S* x, S* J) {
  const S& s = x[0];
  const S& i = x[1];
  S den = 1.0 + p[SIR_K] * i;
  S u = p[SIR_BETA] * i / den;                // d(inc)/dS
  S w = p[SIR_BETA] * s / (den * den);        // d(inc)/dI
  S m = p[SIR_D] + p[SIR_GAMMA] + p[SIR_EPS];
  J[0] = -u - p[SIR_D];
  J[1] = -w;
  J[2] = u;
  J[3] = w - m;
  if (treatment) {
    S od = p[SIR_OMEGA] + i;
    J[3] = J[3] - p[SIR_ALPHA] * p[SIR_OMEGA] / (od * od);
  }
}

template <class S>
inline void jac_inhost(const S* p, const S* x, S* J) {
  const S& X = x[0];
  const S& Y = x[1];
  S den = Y + p[IH_C];
  S phi = p[IH_B] + p[IH_A] * Y / den;                            // infectivity
  S dpsi = p[IH_B] + p[IH_A] * (Y * Y + 2.0 * p[IH_C] * Y) / (den * den);  // d(phi*Y)/dY
  J[0] = -p[IH_D] - phi * Y;
  J[1] = -X * dpsi;
  J[2] = phi * Y;
  J[3] = X * dpsi - 1.0;
}

template <class S>
inline void jac_autoimmune(bool three_d, const S* p, const S* x, S* J) {
  S a, b;
  autoimmune_compounds(p, a, b);
  const S& A = x[0];
  const S& Rn = x[1];
  if (!three_d) {
    J[0] = a - p[AU_SIGMA1] * Rn;
    J[1] = -p[AU_SIGMA1] * A;
    J[2] = 2.0 * b * A + p[AU_BETA];
    J[3] = S(0.0) - p[AU_MUN];
  } else {
    const S& Rd = x[2];
    J[0] = a - p[AU_SIGMA1] * (Rn + p[AU_D] * Rd);
    J[1] = -p[AU_SIGMA1] * A;
    J[2] = -p[AU_SIGMA1] * p[AU_D] * A;
    J[3] = 2.0 * b * A + p[AU_BETA];
    J[4] = S(0.0) - (p[AU_MUN] + p[AU_XI]);
    J[5] = S(0.0);
    J[6] = S(0.0);
    J[7] = p[AU_C] * p[AU_XI];
    J[8] = S(0.0) - p[AU_MUD];
  }
}

// Row-major dim x dim, tightly packed (4 entries for planar, 9 for 3-d).
template <class S>
inline void jac_any(ModelId m, const S* p, const S* x, S* J) {
  switch (m) {
    case ModelId::sir_concave: jac_sir(false, p, x, J); break;
    case ModelId::sir_treatment: jac_sir(true, p, x, J); break;
    case ModelId::inhost_convex: jac_inhost(p, x, J); break;
    case ModelId::autoimmune_2d: jac_autoimmune(false, p, x, J); break;
    case ModelId::autoimmune_3d: jac_autoimmune(true, p, x, J); break;
  }
}

// ---- infected-branch quadratic ---------------------------------------------
// Eliminating the recovered/uninfected pool from the equilibrium conditions
// leaves one quadratic in the disease-load component. The leading
// coefficient is positive for every valid parameter set.

template <class S>
inline QuadCoeffs<S> quad_coeffs(ModelId m, const S* p) {
  switch (m) {
    case ModelId::sir_concave: {
      S mm = p[SIR_D] + p[SIR_GAMMA] + p[SIR_EPS];
      S q = p[SIR_D] * p[SIR_K] + p[SIR_BETA];
      return {mm * q, mm * p[SIR_D] - p[SIR_BETA] * p[SIR_LAMBDA], S(0.0)};
    }
    case ModelId::sir_treatment: {
      S mm = p[SIR_D] + p[SIR_GAMMA] + p[SIR_EPS];
      S q = p[SIR_D] * p[SIR_K] + p[SIR_BETA];
      S a2 = mm * q;
      S a1 = (q * p[SIR_OMEGA] + p[SIR_D]) * mm + q * p[SIR_ALPHA] -
             p[SIR_BETA] * p[SIR_LAMBDA];
      S a0 = (mm * p[SIR_OMEGA] + p[SIR_ALPHA]) * p[SIR_D] -
             p[SIR_BETA] * p[SIR_LAMBDA] * p[SIR_OMEGA];
      return {a2, a1, a0};
    }
    case ModelId::inhost_convex: {
      S a2 = p[IH_A] + p[IH_B];
      S a1 = p[IH_B] * p[IH_C] + p[IH_D] - p[IH_A] - p[IH_B];
      S a0 = p[IH_C] * (p[IH_D] - p[IH_B]);
      return {a2, a1, a0};
    }
    case ModelId::autoimmune_2d: {
      S a, b;
      autoimmune_compounds(p, a, b);
      return {b * p[AU_SIGMA1], p[AU_BETA] * p[AU_SIGMA1], S(0.0) - p[AU_MUN] * a};
    }
    case ModelId::autoimmune_3d: {
      S kk = p[AU_MUD] * (p[AU_MUN] + p[AU_XI]) /
             ((p[AU_V] + p[AU_MUG]) * (p[AU_C] * p[AU_D] * p[AU_XI] + p[AU_MUD]) *
              p[AU_SIGMA1]);
      S a2 = p[AU_PI1] * p[AU_LAMBDAE];
      S a1 = p[AU_BETA] * p[AU_MUE];
      S a0 = kk * ((p[AU_B1] + p[AU_MUA]) * (p[AU_MUG] + p[AU_V]) * p[AU_MUE] -
                   p[AU_F] * p[AU_GAMMA] * p[AU_V] * p[AU_LAMBDAE]);
      return {a2, a1, a0};
    }
  }
  return {S(0.0), S(0.0), S(0.0)};
}

// ---- branch lift ------------------------------------------------------------
// Back-substitution from a quadratic root y to the full equilibrium state.

template <class S>
inline void lift_state(ModelId m, const S* p, const S& y, S* x) {
  switch (m) {
    case ModelId::sir_concave:
    case ModelId::sir_treatment: {
      S q = p[SIR_D] * p[SIR_K] + p[SIR_BETA];
      x[0] = p[SIR_LAMBDA] * (1.0 + p[SIR_K] * y) / (q * y + p[SIR_D]);
      x[1] = y;
      break;
    }
    case ModelId::inhost_convex: {
      x[0] = (y + p[IH_C]) / ((p[IH_A] + p[IH_B]) * y + p[IH_B] * p[IH_C]);
      x[1] = y;
      break;
    }
    case ModelId::autoimmune_2d: {
      S a, b;
      autoimmune_compounds(p, a, b);
      x[0] = y;
      x[1] = (b * y + p[AU_BETA]) * y / p[AU_MUN];
      break;
    }
    case ModelId::autoimmune_3d: {
      x[0] = y;
      S rn = (p[AU_BETA] * p[AU_MUE] + p[AU_PI1] * p[AU_LAMBDAE] * y) * y /
             (p[AU_MUE] * (p[AU_MUN] + p[AU_XI]));
      x[1] = rn;
      x[2] = p[AU_C] * p[AU_XI] * rn / p[AU_MUD];
      break;
    }
  }
}

// ---- parameter elimination along the branch ---------------------------------
// The quadratic is linear (or at worst rational) in the designated
// bifurcation parameter, so a branch point y pins the parameter down.

template <class S>
inline S branch_param(ModelId m, const S* p, const S& y) {
  switch (m) {
    case ModelId::sir_concave: {
      S mm = p[SIR_D] + p[SIR_GAMMA] + p[SIR_EPS];
      S q = p[SIR_D] * p[SIR_K] + p[SIR_BETA];
      return (mm * q * y + mm * p[SIR_D]) / p[SIR_BETA];
    }
    case ModelId::sir_treatment: {
      S mm = p[SIR_D] + p[SIR_GAMMA] + p[SIR_EPS];
      S q = p[SIR_D] * p[SIR_K] + p[SIR_BETA];
      S b0 = (q * p[SIR_OMEGA] + p[SIR_D]) * mm + q * p[SIR_ALPHA];
      S c0 = (mm * p[SIR_OMEGA] + p[SIR_ALPHA]) * p[SIR_D];
      return (mm * q * y * y + b0 * y + c0) /
             (p[SIR_BETA] * (y + p[SIR_OMEGA]));
    }
    case ModelId::inhost_convex: {
      S num = p[IH_A] * y * y + (p[IH_D] - p[IH_A]) * y + p[IH_C] * p[IH_D];
      S den = y * y + (p[IH_C] - 1.0) * y - p[IH_C];
      return (S(0.0) - num) / den;
    }
    case ModelId::autoimmune_2d: {
      // f8(y) = 0 is linear in lambda_E through both compounds.
      S slope = p[AU_SIGMA1] * p[AU_PI1] * y * y / p[AU_MUE] -
                p[AU_MUN] * p[AU_F] * p[AU_V] * p[AU_GAMMA] /
                    (p[AU_MUE] * (p[AU_V] + p[AU_MUG]));
      S rest = p[AU_BETA] * p[AU_SIGMA1] * y +
               p[AU_MUN] * (p[AU_B1] + p[AU_MUA]);
      return (S(0.0) - rest) / slope;
    }
    case ModelId::autoimmune_3d: {
      S kk = p[AU_MUD] * (p[AU_MUN] + p[AU_XI]) /
             ((p[AU_V] + p[AU_MUG]) * (p[AU_C] * p[AU_D] * p[AU_XI] + p[AU_MUD]) *
              p[AU_SIGMA1]);
      S c1 = (p[AU_B1] + p[AU_MUA]) * (p[AU_MUG] + p[AU_V]) * p[AU_MUE];
      S c2 = p[AU_F] * p[AU_GAMMA] * p[AU_V];
      return (p[AU_BETA] * p[AU_MUE] * y + kk * c1) /
             (kk * c2 - p[AU_PI1] * y * y);
    }
  }
  return S(0.0);
}

}  // namespace bifurc::detail
