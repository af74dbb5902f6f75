#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "bifurc/models.hpp"

namespace bifurc {

// The four incidence-style curves whose geometry decides how many infected
// equilibria a ray can cut out of the branch.
enum class IncidenceCurve {
  saturating,           // beta*S*I/(1+kI) at fixed S          (treatment models)
  treatment_adjusted,   // the above minus alpha*I/(omega+I)   (net growth curve)
  convex_fixed_host,    // (B + AY/(Y+C))*X*Y at fixed X       (in-host model)
  convex_on_branch,     // same with X eliminated through the host equation
};

std::string_view incidence_curve_name(IncidenceCurve c);
std::optional<IncidenceCurve> incidence_curve_from_name(std::string_view name);

enum class Concavity { concave, convex, convex_concave };

struct ShapeReport {
  bool vanishes_at_origin = false;   // f(0) = 0
  bool monotone_increasing = false;  // f' > 0 on the whole grid
  Concavity concavity = Concavity::concave;
  std::optional<double> inflection;  // present for convex_concave
  std::vector<double> ray_hits;      // positive abscissae of curve == ray
  double ray_slope = 0;
  double grid_max = 0;
};

// Default ray slope: the per-capita removal rate d+gamma+epsilon for the
// treatment-model curves, 1 for the in-host curves.
double default_ray_slope(IncidenceCurve c, const ParameterSet& p);

double incidence_value(IncidenceCurve c, const ParameterSet& p, double fixed_host, double y);
double incidence_d1(IncidenceCurve c, const ParameterSet& p, double fixed_host, double y);
double incidence_d2(IncidenceCurve c, const ParameterSet& p, double fixed_host, double y);

// Sign-scan classification of the curve's shape on (0, grid_max], analytic
// first and second derivatives, inflection refined to 1e-8.
ShapeReport shape_classify(IncidenceCurve c, const ParameterSet& p, double fixed_host,
                           double grid_max = 1e3, std::optional<double> ray_slope = {});

// Positive abscissae where the curve meets the ray slope*y, each located to
// a residual below 1e-10 of the local scale.
std::vector<double> ray_intersections(IncidenceCurve c, const ParameterSet& p,
                                      double fixed_host, double slope,
                                      double grid_max = 1e3);

}  // namespace bifurc
