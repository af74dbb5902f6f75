#pragma once

#include <array>
#include <utility>
#include <vector>

#include "bifurc/models.hpp"

namespace bifurc {

// Quadratic satisfied by the disease-load component of the infected
// equilibria: a2*y^2 + a1*y + a0 = 0 with a2 > 0.
struct QuadraticBranch {
  double a2 = 0, a1 = 0, a0 = 0;
  double discriminant = 0;
  std::array<double, 2> roots{};  // ascending; only the first n_roots are set
  int n_roots = 0;                // 0, 1 (double root), or 2
  bool is_double = false;
};

enum class BranchTag { uninfected, infected_lower, infected_upper, double_root };

struct EquilibriumPoint {
  State state;
  BranchTag branch = BranchTag::uninfected;
  bool feasible = false;
};

// Fold of the infected branch in the designated bifurcation parameter.
struct TurningPoint {
  bool exists = false;
  double param_value = 0;
  State state;  // vertex of the quadratic, lifted to a full state
};

enum class BifShape { forward, backward_positive, backward_negative, none };

// Disease-free state together with the threshold quantity: the basic
// reproduction number for the infection models, the compound activation
// rate a (threshold a = 0) for the autoimmune models.
std::pair<EquilibriumPoint, double> uninfected_equilibrium(const ParameterSet& p);

QuadraticBranch infected_quadratic(const ParameterSet& p);

// All real roots of the branch quadratic lifted to full states. Residuals
// are checked against ||rhs||_inf < 1e-9 * (1 + ||x||_inf).
std::vector<EquilibriumPoint> infected_equilibria(const ParameterSet& p);

// Solves discriminant(param) = 0 for the designated bifurcation parameter.
// When several folds exist the one adjacent to the transcritical threshold
// (the largest root) is returned. exists = false when the discriminant never
// changes sign.
TurningPoint turning_point(const ParameterSet& p);

BifShape classify_bifurcation_shape(const ParameterSet& p);

// Back-substitution from a branch root to the full state. Throws DomainError
// when the lift denominator vanishes at that root.
State lift_root(const ParameterSet& p, double y);

// Closed-form value of the designated parameter at which the infected branch
// crosses the uninfected one (R0 = 1, or a = 0 for the autoimmune models).
double transcritical_threshold(const ParameterSet& p);

// Stable root computation for a2*y^2 + a1*y + a0 with a2 > 0; used by the
// branch solvers and exposed for reuse in tests.
QuadraticBranch solve_quadratic(double a2, double a1, double a0);

}  // namespace bifurc
