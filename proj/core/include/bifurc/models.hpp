#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bifurc/errors.hpp"

namespace bifurc {

// The five vector fields handled by this library. Planar models carry a
// susceptible/uninfected pool and an infected pool; the autoimmune models
// track mature antigen-presenting cells plus one or two regulatory pools.
enum class ModelId {
  sir_concave,     // (S, I), saturating incidence
  sir_treatment,   // (S, I), saturating incidence plus saturating treatment
  inhost_convex,   // (X, Y), infectivity grows with infected density
  autoimmune_2d,   // (A, Rn)
  autoimmune_3d,   // (A, Rn, Rd)
};

int dimension(ModelId m);
// Index of the component that plays the role of "disease load" in
// bifurcation diagrams (I, Y, or A).
int infected_index(ModelId m);
// Index of the designated bifurcation parameter (Lambda, B, or lambda_E).
int bif_param_index(ModelId m);
std::span<const std::string_view> param_names(ModelId m);
std::span<const std::string_view> component_names(ModelId m);
std::string_view model_name(ModelId m);
std::optional<ModelId> model_from_name(std::string_view name);

// State vector of dimension 2 or 3. Negative components are legal inputs
// everywhere; feasibility is a query, not an enforced invariant.
class State {
public:
  State() = default;
  State(double a, double b) : v_{a, b, 0.0}, dim_(2) {}
  State(double a, double b, double c) : v_{a, b, c}, dim_(3) {}
  static State zeros(int dim);

  int dim() const { return dim_; }
  double operator[](int i) const { return v_[i]; }
  double& operator[](int i) { return v_[i]; }
  const double* data() const { return v_.data(); }
  double* data() { return v_.data(); }

  double inf_norm() const;
  bool feasible() const;  // all components >= 0
  bool finite() const;

private:
  std::array<double, 3> v_{};
  int dim_ = 0;
};

struct Matrix {
  std::array<double, 9> a{};
  int dim = 0;

  double operator()(int i, int j) const { return a[3 * i + j]; }
  double& operator()(int i, int j) { return a[3 * i + j]; }
  double trace() const;
  double det() const;
  double minor_sum() const;  // sum of principal 2x2 minors (dim 3)
};

// Positive, finite rate constants for one model, validated on construction.
// Values are stored packed in the order given by param_names().
class ParameterSet {
public:
  ParameterSet(ModelId m, std::span<const double> values);
  static ParameterSet from_named(ModelId m,
                                 const std::vector<std::pair<std::string, double>>& kv);

  ModelId model() const { return model_; }
  std::span<const double> values() const { return {v_.data(), v_.size()}; }
  double operator[](int i) const { return v_[i]; }
  std::size_t size() const { return v_.size(); }

  // Copy with one entry replaced (re-validated).
  ParameterSet with(int index, double value) const;
  // Value of the designated bifurcation parameter.
  double bif_value() const { return v_[bif_param_index(model_)]; }

private:
  ModelId model_;
  std::vector<double> v_;
};

// Time derivative of the state. Throws DomainError when the state sits on a
// singular denominator of the incidence or treatment term.
State rhs(const ParameterSet& p, const State& x);

// Analytic Jacobian of rhs; same error behaviour.
Matrix jacobian(const ParameterSet& p, const State& x);

// The autoimmune compounds (a, b): a is the net activation rate of mature
// pAPCs and crosses zero at the static-bifurcation threshold, b is the
// effector-mediated suppression gain. Only defined for the autoimmune models.
std::pair<double, double> compound_params(const ParameterSet& p);

}  // namespace bifurc
