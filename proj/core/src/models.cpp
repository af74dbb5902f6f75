#include "bifurc/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "bifurc/detail/kernels.hpp"

namespace bifurc {

namespace {

using std::string_view;

constexpr string_view kSirConcaveParams[] = {"Lambda", "beta", "k", "d", "gamma", "epsilon"};
constexpr string_view kSirTreatmentParams[] = {"Lambda", "beta", "k",     "d",
                                               "gamma",  "epsilon", "alpha", "omega"};
constexpr string_view kInhostParams[] = {"A", "B", "C", "D"};
constexpr string_view kAuto2dParams[] = {"f",    "v",    "sigma1", "b1",  "mu_A", "pi1",
                                         "beta", "mu_n", "mu_E",   "gamma", "mu_G", "lambda_E"};
constexpr string_view kAuto3dParams[] = {"f",    "v",    "sigma1", "b1",  "mu_A", "pi1",
                                         "beta", "mu_n", "mu_E",   "gamma", "mu_G", "lambda_E",
                                         "mu_d", "c",    "d",      "xi"};

constexpr string_view kSirComponents[] = {"S", "I"};
constexpr string_view kInhostComponents[] = {"X", "Y"};
constexpr string_view kAuto2dComponents[] = {"A", "R_n"};
constexpr string_view kAuto3dComponents[] = {"A", "R_n", "R_d"};

constexpr string_view kModelNames[] = {"SIR_CONCAVE", "SIR_TREATMENT", "INHOST_CONVEX",
                                       "AUTOIMMUNE_2D", "AUTOIMMUNE_3D"};

}  // namespace

int dimension(ModelId m) { return m == ModelId::autoimmune_3d ? 3 : 2; }

int infected_index(ModelId m) {
  switch (m) {
    case ModelId::sir_concave:
    case ModelId::sir_treatment:
    case ModelId::inhost_convex: return 1;
    case ModelId::autoimmune_2d:
    case ModelId::autoimmune_3d: return 0;
  }
  return 1;
}

int bif_param_index(ModelId m) {
  switch (m) {
    case ModelId::sir_concave:
    case ModelId::sir_treatment: return detail::SIR_LAMBDA;
    case ModelId::inhost_convex: return detail::IH_B;
    case ModelId::autoimmune_2d:
    case ModelId::autoimmune_3d: return detail::AU_LAMBDAE;
  }
  return 0;
}

std::span<const string_view> param_names(ModelId m) {
  switch (m) {
    case ModelId::sir_concave: return kSirConcaveParams;
    case ModelId::sir_treatment: return kSirTreatmentParams;
    case ModelId::inhost_convex: return kInhostParams;
    case ModelId::autoimmune_2d: return kAuto2dParams;
    case ModelId::autoimmune_3d: return kAuto3dParams;
  }
  return {};
}

std::span<const string_view> component_names(ModelId m) {
  switch (m) {
    case ModelId::sir_concave:
    case ModelId::sir_treatment: return kSirComponents;
    case ModelId::inhost_convex: return kInhostComponents;
    case ModelId::autoimmune_2d: return kAuto2dComponents;
    case ModelId::autoimmune_3d: return kAuto3dComponents;
  }
  return {};
}

string_view model_name(ModelId m) { return kModelNames[static_cast<int>(m)]; }

std::optional<ModelId> model_from_name(string_view name) {
  for (int i = 0; i < 5; ++i)
    if (name == kModelNames[i]) return static_cast<ModelId>(i);
  return std::nullopt;
}

State State::zeros(int dim) {
  State s;
  s.dim_ = dim;
  return s;
}

double State::inf_norm() const {
  double n = 0.0;
  for (int i = 0; i < dim_; ++i) n = std::max(n, std::fabs(v_[i]));
  return n;
}

bool State::feasible() const {
  for (int i = 0; i < dim_; ++i)
    if (v_[i] < 0.0) return false;
  return true;
}

bool State::finite() const {
  for (int i = 0; i < dim_; ++i)
    if (!std::isfinite(v_[i])) return false;
  return true;
}

double Matrix::trace() const {
  double t = 0.0;
  for (int i = 0; i < dim; ++i) t += (*this)(i, i);
  return t;
}

double Matrix::det() const {
  const Matrix& J = *this;
  if (dim == 2) return J(0, 0) * J(1, 1) - J(0, 1) * J(1, 0);
  return J(0, 0) * (J(1, 1) * J(2, 2) - J(1, 2) * J(2, 1)) -
         J(0, 1) * (J(1, 0) * J(2, 2) - J(1, 2) * J(2, 0)) +
         J(0, 2) * (J(1, 0) * J(2, 1) - J(1, 1) * J(2, 0));
}

double Matrix::minor_sum() const {
  const Matrix& J = *this;
  return J(0, 0) * J(1, 1) - J(0, 1) * J(1, 0) + J(0, 0) * J(2, 2) -
         J(0, 2) * J(2, 0) + J(1, 1) * J(2, 2) - J(1, 2) * J(2, 1);
}

ParameterSet::ParameterSet(ModelId m, std::span<const double> values) : model_(m) {
  auto names = param_names(m);
  if (values.size() != names.size())
    throw std::invalid_argument("parameter count mismatch for " +
                                std::string(model_name(m)) + ": expected " +
                                std::to_string(names.size()) + ", got " +
                                std::to_string(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]) || values[i] <= 0.0)
      throw std::invalid_argument("parameter " + std::string(names[i]) +
                                  " must be positive and finite");
  }
  v_.assign(values.begin(), values.end());
}

ParameterSet ParameterSet::from_named(
    ModelId m, const std::vector<std::pair<std::string, double>>& kv) {
  auto names = param_names(m);
  std::vector<double> vals(names.size(), 0.0);
  std::vector<bool> seen(names.size(), false);
  for (const auto& [key, value] : kv) {
    auto it = std::find(names.begin(), names.end(), key);
    if (it == names.end())
      throw std::invalid_argument("unknown parameter '" + key + "' for model " +
                                  std::string(model_name(m)));
    std::size_t idx = static_cast<std::size_t>(it - names.begin());
    if (seen[idx]) throw std::invalid_argument("duplicate parameter '" + key + "'");
    seen[idx] = true;
    vals[idx] = value;
  }
  for (std::size_t i = 0; i < names.size(); ++i)
    if (!seen[i])
      throw std::invalid_argument("missing parameter '" + std::string(names[i]) + "'");
  return ParameterSet(m, vals);
}

ParameterSet ParameterSet::with(int index, double value) const {
  std::vector<double> vals(v_);
  vals.at(static_cast<std::size_t>(index)) = value;
  return ParameterSet(model_, vals);
}

namespace {

// Identify which denominator vanished, for the error message.
void check_denominators(ModelId m, const ParameterSet& p, const State& x) {
  switch (m) {
    case ModelId::sir_concave:
    case ModelId::sir_treatment: {
      if (1.0 + p[detail::SIR_K] * x[1] == 0.0)
        throw DomainError("singular incidence denominator 1 + k*I at I = " +
                          std::to_string(x[1]));
      if (m == ModelId::sir_treatment && p[detail::SIR_OMEGA] + x[1] == 0.0)
        throw DomainError("singular treatment denominator omega + I at I = " +
                          std::to_string(x[1]));
      break;
    }
    case ModelId::inhost_convex: {
      if (x[1] + p[detail::IH_C] == 0.0)
        throw DomainError("singular infectivity denominator Y + C at Y = " +
                          std::to_string(x[1]));
      break;
    }
    default: break;  // autoimmune denominators are parameter-only, hence positive
  }
}

}  // namespace

State rhs(const ParameterSet& p, const State& x) {
  ModelId m = p.model();
  if (x.dim() != dimension(m)) throw std::invalid_argument("state dimension mismatch");
  check_denominators(m, p, x);
  State out = State::zeros(x.dim());
  detail::rhs_any(m, p.values().data(), x.data(), out.data());
  if (!out.finite())
    throw DomainError("vector field overflow near a singular denominator");
  return out;
}

Matrix jacobian(const ParameterSet& p, const State& x) {
  ModelId m = p.model();
  if (x.dim() != dimension(m)) throw std::invalid_argument("state dimension mismatch");
  check_denominators(m, p, x);
  Matrix J;
  J.dim = x.dim();
  double buf[9];
  detail::jac_any(m, p.values().data(), x.data(), buf);
  for (int i = 0; i < J.dim; ++i)
    for (int j = 0; j < J.dim; ++j) J(i, j) = buf[J.dim * i + j];
  for (int i = 0; i < J.dim; ++i)
    for (int j = 0; j < J.dim; ++j)
      if (!std::isfinite(J(i, j)))
        throw DomainError("Jacobian overflow near a singular denominator");
  return J;
}

std::pair<double, double> compound_params(const ParameterSet& p) {
  if (p.model() != ModelId::autoimmune_2d && p.model() != ModelId::autoimmune_3d)
    throw std::invalid_argument("compound_params is defined for the autoimmune models only");
  double a, b;
  detail::autoimmune_compounds(p.values().data(), a, b);
  return {a, b};
}

}  // namespace bifurc
