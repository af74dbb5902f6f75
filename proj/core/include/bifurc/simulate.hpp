#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "bifurc/equilibria.hpp"
#include "bifurc/models.hpp"

namespace bifurc {

struct IntegratorConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double max_step = std::numeric_limits<double>::infinity();
  double t_end = 0;            // required, > 0
  double sample_interval = 0;  // 0: record every accepted step

  // Copy with both tolerances scaled, for refinement checks.
  IntegratorConfig tightened(double factor) const {
    IntegratorConfig c = *this;
    c.rel_tol *= factor;
    c.abs_tol *= factor;
    return c;
  }
};

// Default verdict horizon per model family.
double default_t_end(ModelId m);

struct StepStats {
  long accepted = 0;
  long rejected = 0;
  long rhs_evals = 0;
};

class Trajectory {
public:
  Trajectory(int dim) : dim_(dim) {}
  void push(double t, const double* x);
  std::size_t size() const { return t_.size(); }
  int dim() const { return dim_; }
  double time(std::size_t i) const { return t_[i]; }
  State state(std::size_t i) const;
  double component(std::size_t i, int k) const { return x_[i * dim_ + k]; }
  const std::vector<double>& times() const { return t_; }
  StepStats stats;

private:
  int dim_;
  std::vector<double> t_;
  std::vector<double> x_;
};

// Adaptive Dormand-Prince 5(4) pair. Throws NumericalError (with the time
// reached) when the step size underflows.
Trajectory integrate(const ParameterSet& p, const State& ic, const IntegratorConfig& cfg);

struct RecurrenceMetrics {
  int episodes = 0;
  double quiescent_fraction = 0;
};

struct RecurrenceThresholds {
  // Negative values mean "derive from the terminal window": theta_hi = 0.5
  // and theta_lo = 0.1 of the terminal-window maximum, and the minimum
  // quiescent duration is half the mean spacing of the episode peaks.
  double theta_hi = -1;
  double theta_lo = -1;
  double min_quiescent_duration = -1;
  double flat_floor = 1e-9;  // max below this (absolute) counts as flat
};

// Episodes are maximal intervals with the watched component above theta_hi;
// quiescence is time below theta_lo in stretches longer than the minimum
// duration, as a fraction of the analysed span.
RecurrenceMetrics recurrence_metrics(const Trajectory& traj, int component,
                                     const RecurrenceThresholds& th = {});

enum class AttractorKind { equilibrium, limit_cycle, recurrent, undecided };

struct AttractorVerdict {
  AttractorKind kind = AttractorKind::undecided;
  int equilibrium_index = -1;  // into the supplied equilibria list
  double period = 0;           // limit_cycle
  double amplitude = 0;        // limit_cycle, watched component
  int episodes = 0;
  double quiescent_fraction = 0;
  std::string diagnostics;
};

struct DetectOptions {
  double equilibrium_tol = 1e-5;   // scale-relative terminal-window radius
  double period_jit_max = 0.02;    // relative peak-spacing jitter
  int min_episodes = 3;
  double min_quiescent_fraction = 0.5;
  RecurrenceThresholds recurrence{};
};

AttractorVerdict detect_attractor(const Trajectory& traj, const ParameterSet& p,
                                  std::span<const EquilibriumPoint> equilibria,
                                  const DetectOptions& opts = {});

enum class BistableFlag { yes, no, inconclusive };

struct BistabilityResult {
  std::vector<AttractorVerdict> verdicts;  // one per initial condition
  BistableFlag flag = BistableFlag::no;
};

// Integrates every initial condition and compares the attractors reached.
BistabilityResult bistability_probe(const ParameterSet& p, std::span<const State> ics,
                                    const IntegratorConfig& cfg,
                                    const DetectOptions& opts = {});

}  // namespace bifurc
