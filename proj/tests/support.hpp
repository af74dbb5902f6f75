#pragma once

// Shared fixtures for the test suites: reference parameter sets, seeded
// random draws, and the finite-difference Jacobian oracle.

#include <cmath>
#include <random>
#include <vector>

#include "bifurc/models.hpp"

namespace testsup {

using namespace bifurc;

// Fixed values used throughout the reference tables.
inline ParameterSet inhost(double A, double B, double C = 0.823, double D = 0.057) {
  return ParameterSet(ModelId::inhost_convex, std::vector<double>{A, B, C, D});
}

inline ParameterSet sir_treatment(double k, double Lambda) {
  return ParameterSet(ModelId::sir_treatment,
                      std::vector<double>{Lambda, 0.01, k, 0.1, 0.01, 0.02, 6.0, 7.0});
}

inline ParameterSet sir_concave(double k, double Lambda) {
  return ParameterSet(ModelId::sir_concave,
                      std::vector<double>{Lambda, 0.01, k, 0.1, 0.01, 0.02});
}

inline std::vector<double> autoimmune_values(double lambda_E = 1000.0) {
  return {1e-4, 2.5e-3, 3e-6, 0.25, 0.2, 0.016, 200.0, 0.1, 0.2, 2000.0, 5.0, lambda_E,
          0.2, 8.0, 2.0, 0.025};
}

inline ParameterSet autoimmune3(double lambda_E = 1000.0) {
  return ParameterSet(ModelId::autoimmune_3d, autoimmune_values(lambda_E));
}

inline ParameterSet autoimmune2(double lambda_E = 1000.0) {
  auto v = autoimmune_values(lambda_E);
  v.resize(12);
  return ParameterSet(ModelId::autoimmune_2d, v);
}

inline double log_uniform(std::mt19937& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

// Random positive parameter draws in ranges where every model is tame.
inline ParameterSet draw_params(std::mt19937& rng, ModelId m) {
  auto lu = [&](double lo, double hi) { return log_uniform(rng, lo, hi); };
  switch (m) {
    case ModelId::sir_concave:
      return ParameterSet(m, std::vector<double>{lu(1, 20), lu(1e-3, 0.1), lu(1e-4, 0.1),
                                                 lu(0.02, 0.5), lu(1e-3, 0.5), lu(1e-3, 0.5)});
    case ModelId::sir_treatment:
      return ParameterSet(m, std::vector<double>{lu(1, 20), lu(1e-3, 0.1), lu(1e-4, 0.1),
                                                 lu(0.02, 0.5), lu(1e-3, 0.5), lu(1e-3, 0.5),
                                                 lu(0.5, 10), lu(1, 10)});
    case ModelId::inhost_convex:
      return ParameterSet(m, std::vector<double>{lu(0.01, 1), lu(5e-3, 0.2), lu(0.1, 2),
                                                 lu(0.01, 0.5)});
    case ModelId::autoimmune_2d:
    case ModelId::autoimmune_3d: {
      auto base = autoimmune_values();
      std::vector<double> v;
      for (double b : base) v.push_back(b * lu(0.5, 2.0));
      if (m == ModelId::autoimmune_2d) v.resize(12);
      return ParameterSet(m, v);
    }
  }
  throw std::logic_error("unreachable");
}

inline State draw_state(std::mt19937& rng, ModelId m) {
  auto lu = [&](double lo, double hi) { return log_uniform(rng, lo, hi); };
  if (dimension(m) == 2) return State(lu(0.01, 50), lu(0.01, 50));
  return State(lu(0.01, 50), lu(0.01, 50), lu(0.01, 50));
}

// Central-difference Jacobian with per-component step 1e-6 * (1 + |x_i|).
inline Matrix fd_jacobian(const ParameterSet& p, const State& x) {
  Matrix J;
  J.dim = x.dim();
  for (int j = 0; j < x.dim(); ++j) {
    double h = 1e-6 * (1.0 + std::fabs(x[j]));
    State xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    State fp = rhs(p, xp), fm = rhs(p, xm);
    for (int i = 0; i < x.dim(); ++i) J(i, j) = (fp[i] - fm[i]) / (2.0 * h);
  }
  return J;
}

inline double jacobian_rel_dev(const Matrix& a, const Matrix& b) {
  double scale = 1.0, dev = 0.0;
  for (int i = 0; i < a.dim; ++i)
    for (int j = 0; j < a.dim; ++j) scale = std::max(scale, std::fabs(a(i, j)));
  for (int i = 0; i < a.dim; ++i)
    for (int j = 0; j < a.dim; ++j)
      dev = std::max(dev, std::fabs(a(i, j) - b(i, j)));
  return dev / scale;
}

constexpr ModelId kAllModels[] = {ModelId::sir_concave, ModelId::sir_treatment,
                                  ModelId::inhost_convex, ModelId::autoimmune_2d,
                                  ModelId::autoimmune_3d};

}  // namespace testsup
