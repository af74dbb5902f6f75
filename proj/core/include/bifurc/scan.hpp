#pragma once

#include <optional>
#include <vector>

#include "bifurc/equilibria.hpp"
#include "bifurc/models.hpp"
#include "bifurc/spectral.hpp"

namespace bifurc {

enum class BifKind { transcritical, turning, hopf, neutral_saddle };

struct BifurcationPoint {
  BifKind kind = BifKind::transcritical;
  double param_value = 0;
  State state;
  std::optional<double> omega_c;  // present iff kind == hopf (rad/time)
};

// Closed-form threshold of the designated parameter at which the infected
// branch passes through the uninfected equilibrium.
BifurcationPoint find_transcritical(const ParameterSet& p);

struct HopfSearchOptions {
  bool feasible_only = true;  // scan only the positive side of the branch
  double state_max = 1e3;     // scan domain for the disease-load component
  int grid = 2048;
};

// Zeros of the negated trace (planar) or of c1*c2 - c0 (3-d) along the
// infected branch, the designated parameter eliminated through the branch
// quadratic. Candidates with a positive determinant (planar) or positive c1
// (3-d) are Hopf points; the rest are neutral saddles. Sorted by parameter.
std::vector<BifurcationPoint> find_hopf(const ParameterSet& p,
                                        const HopfSearchOptions& opts = {});

struct BranchSample {
  double param = 0;
  EquilibriumPoint point;
  StabilityReport stability;
  std::optional<BifKind> bifurcation;  // set on rows merged from the finders
};

struct BranchDiagram {
  std::vector<BranchSample> samples;  // sorted by parameter
  std::vector<BifurcationPoint> bifurcations;
  double param_lo = 0, param_hi = 0;
};

// Equilibria and their stability sampled over a parameter interval, with
// the transcritical, turning, and Hopf points merged in as annotated rows.
// A degenerate interval [b, b] produces a single-sample diagram.
BranchDiagram sweep_branch(const ParameterSet& p, double lo, double hi, int samples,
                           bool geometric = false,
                           const HopfSearchOptions& opts = {});

}  // namespace bifurc
