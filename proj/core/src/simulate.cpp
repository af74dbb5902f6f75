#include "bifurc/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bifurc/errors.hpp"
#include "bifurc/spectral.hpp"

namespace bifurc {

double default_t_end(ModelId m) { return dimension(m) == 2 ? 5000.0 : 2000.0; }

void Trajectory::push(double t, const double* x) {
  t_.push_back(t);
  x_.insert(x_.end(), x, x + dim_);
}

State Trajectory::state(std::size_t i) const {
  const double* p = &x_[i * dim_];
  return dim_ == 2 ? State(p[0], p[1]) : State(p[0], p[1], p[2]);
}

namespace {

// Dormand-Prince 5(4) coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

Trajectory integrate(const ParameterSet& p, const State& ic, const IntegratorConfig& cfg) {
  if (!(cfg.t_end > 0.0)) throw std::invalid_argument("t_end must be positive");
  if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0))
    throw std::invalid_argument("tolerances must be positive");
  if (!ic.finite()) throw std::invalid_argument("initial condition must be finite");
  const int n = dimension(p.model());
  if (ic.dim() != n) throw std::invalid_argument("initial condition dimension mismatch");

  Trajectory traj(n);
  double t = 0.0;
  double y[3], ynew[3], err[3];
  double k[7][3];
  for (int i = 0; i < n; ++i) y[i] = ic[i];

  auto f = [&](double yv[3], double out[3]) {
    State s = n == 2 ? State(yv[0], yv[1]) : State(yv[0], yv[1], yv[2]);
    State d = rhs(p, s);
    for (int i = 0; i < n; ++i) out[i] = d[i];
    ++traj.stats.rhs_evals;
  };

  // Largest step the explicit pair tolerates at the local linearization.
  // Without it, quiescent or neutrally rotating stretches let the step
  // balloon past the stability region and rounding noise gets amplified up
  // to the tolerance ceiling. |R(i y)| of the fifth-order solution crosses 1
  // near y = 1, so 0.9 covers the imaginary axis as well.
  auto stability_cap = [&](const double yv[3]) {
    try {
      State s = n == 2 ? State(yv[0], yv[1]) : State(yv[0], yv[1], yv[2]);
      CharPoly cp = char_poly_unchecked(p, s);
      double amax = 0.0;
      for (auto z : eigenvalues(cp)) amax = std::max(amax, std::abs(z));
      return amax > 0.0 ? 0.9 / amax : std::numeric_limits<double>::infinity();
    } catch (const std::exception&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  f(y, k[0]);
  double fn = 0.0;
  for (int i = 0; i < n; ++i)
    fn = std::max(fn, std::fabs(k[0][i]) / (cfg.abs_tol + cfg.rel_tol * std::fabs(y[i])));
  double h = std::min({cfg.t_end, cfg.max_step, 0.01 / std::max(fn, 1e-4), stability_cap(y)});

  traj.push(0.0, y);
  double next_sample = cfg.sample_interval > 0 ? cfg.sample_interval : -1.0;

  bool fsal_valid = true;
  while (t < cfg.t_end) {
    bool last = false;
    if (t + h >= cfg.t_end) {
      h = cfg.t_end - t;
      last = true;
    }
    if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::fabs(t), 1.0))
      throw NumericalError("step size underflow at t = " + std::to_string(t), t);

    if (!fsal_valid) f(y, k[0]);
    double ytmp[3];
    for (int i = 0; i < n; ++i) ytmp[i] = y[i] + h * a21 * k[0][i];
    f(ytmp, k[1]);
    for (int i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a31 * k[0][i] + a32 * k[1][i]);
    f(ytmp, k[2]);
    for (int i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a41 * k[0][i] + a42 * k[1][i] + a43 * k[2][i]);
    f(ytmp, k[3]);
    for (int i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a51 * k[0][i] + a52 * k[1][i] + a53 * k[2][i] + a54 * k[3][i]);
    f(ytmp, k[4]);
    for (int i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a61 * k[0][i] + a62 * k[1][i] + a63 * k[2][i] +
                            a64 * k[3][i] + a65 * k[4][i]);
    f(ytmp, k[5]);
    for (int i = 0; i < n; ++i)
      ynew[i] = y[i] + h * (b1 * k[0][i] + b3 * k[2][i] + b4 * k[3][i] + b5 * k[4][i] +
                            b6 * k[5][i]);
    f(ynew, k[6]);
    for (int i = 0; i < n; ++i)
      err[i] = h * (e1 * k[0][i] + e3 * k[2][i] + e4 * k[3][i] + e5 * k[4][i] +
                    e6 * k[5][i] + e7 * k[6][i]);

    double en = 0.0;
    bool finite = true;
    for (int i = 0; i < n; ++i) {
      if (!std::isfinite(ynew[i])) finite = false;
      double sc = cfg.abs_tol +
                  cfg.rel_tol * std::max(std::fabs(y[i]), std::fabs(ynew[i]));
      double r = err[i] / sc;
      en += r * r;
    }
    en = std::sqrt(en / n);

    if (finite && en <= 1.0) {
      double tnew = t + h;
      // Hermite-interpolated uniform samples inside the accepted step.
      if (cfg.sample_interval > 0) {
        while (next_sample <= tnew + 1e-14 * tnew && next_sample < cfg.t_end) {
          double th = (next_sample - t) / h;
          double h00 = (1 + 2 * th) * (1 - th) * (1 - th);
          double h10 = th * (1 - th) * (1 - th);
          double h01 = th * th * (3 - 2 * th);
          double h11 = th * th * (th - 1);
          double ys[3];
          for (int i = 0; i < n; ++i)
            ys[i] = h00 * y[i] + h10 * h * k[0][i] + h01 * ynew[i] + h11 * h * k[6][i];
          traj.push(next_sample, ys);
          next_sample += cfg.sample_interval;
        }
        if (last) traj.push(cfg.t_end, ynew);
      } else {
        traj.push(tnew, ynew);
      }
      t = tnew;
      for (int i = 0; i < n; ++i) {
        y[i] = ynew[i];
        k[0][i] = k[6][i];  // FSAL
      }
      fsal_valid = true;
      ++traj.stats.accepted;
      double fac = 0.9 * std::pow(std::max(en, 1e-10), -0.2);
      h = std::min({cfg.max_step, h * std::clamp(fac, 0.2, 5.0), stability_cap(y)});
    } else {
      ++traj.stats.rejected;
      double fac = finite ? std::max(0.1, 0.9 * std::pow(en, -0.2)) : 0.1;
      h *= fac;
      fsal_valid = true;  // k[0] still holds f(t, y)
    }
  }
  return traj;
}

namespace {

std::size_t window_start(const Trajectory& tr, double tail_fraction) {
  double t0 = tr.time(tr.size() - 1) * (1.0 - tail_fraction);
  std::size_t i = 0;
  while (i + 1 < tr.size() && tr.time(i) < t0) ++i;
  return i;
}

struct Peaks {
  std::vector<double> t, v;
};

Peaks local_maxima(const Trajectory& tr, int comp, std::size_t from) {
  Peaks pk;
  for (std::size_t i = std::max<std::size_t>(from, 1); i + 1 < tr.size(); ++i) {
    double a = tr.component(i - 1, comp), b = tr.component(i, comp),
           c = tr.component(i + 1, comp);
    if (b >= a && b > c) {
      pk.t.push_back(tr.time(i));
      pk.v.push_back(b);
    }
  }
  return pk;
}

}  // namespace

RecurrenceMetrics recurrence_metrics(const Trajectory& traj, int component,
                                     const RecurrenceThresholds& th) {
  RecurrenceMetrics m;
  if (traj.size() < 3) return {0, 1.0};

  std::size_t w = window_start(traj, 0.8);
  double vmax = -std::numeric_limits<double>::infinity();
  double vmin = std::numeric_limits<double>::infinity();
  for (std::size_t i = w; i < traj.size(); ++i) {
    vmax = std::max(vmax, traj.component(i, component));
    vmin = std::min(vmin, traj.component(i, component));
  }
  if (vmax < th.flat_floor || vmax - vmin < th.flat_floor * std::max(1.0, std::fabs(vmax)))
    return {0, 1.0};  // flat signal: no episodes, fully quiescent

  double hi = th.theta_hi > 0 ? th.theta_hi : 0.5 * vmax;
  double lo = th.theta_lo > 0 ? th.theta_lo : 0.1 * vmax;

  // Episodes and their peak times over the analysis window.
  std::vector<double> peak_t;
  bool above = false;
  double peak_time = 0, peak_val = -1;
  int episodes = 0;
  for (std::size_t i = w; i < traj.size(); ++i) {
    double v = traj.component(i, component);
    if (!above && v > hi) {
      above = true;
      ++episodes;
      peak_val = v;
      peak_time = traj.time(i);
    } else if (above) {
      if (v > peak_val) {
        peak_val = v;
        peak_time = traj.time(i);
      }
      if (v < hi) {
        above = false;
        peak_t.push_back(peak_time);
      }
    }
  }
  if (above) peak_t.push_back(peak_time);
  m.episodes = episodes;

  double min_dur = th.min_quiescent_duration;
  if (min_dur <= 0) {
    if (peak_t.size() >= 2) {
      double span = peak_t.back() - peak_t.front();
      min_dur = 0.5 * span / double(peak_t.size() - 1);
    } else {
      min_dur = std::numeric_limits<double>::infinity();
    }
  }

  double quiescent = 0, below_start = 0;
  bool below = false;
  for (std::size_t i = w; i < traj.size(); ++i) {
    double v = traj.component(i, component);
    double t = traj.time(i);
    if (!below && v < lo) {
      below = true;
      below_start = t;
    } else if (below && (v >= lo || i + 1 == traj.size())) {
      double end = (v >= lo) ? t : traj.time(i);
      if (end - below_start >= min_dur) quiescent += end - below_start;
      below = false;
    }
  }
  double span = traj.time(traj.size() - 1) - traj.time(w);
  m.quiescent_fraction = span > 0 ? quiescent / span : 0.0;
  return m;
}

AttractorVerdict detect_attractor(const Trajectory& traj, const ParameterSet& p,
                                  std::span<const EquilibriumPoint> equilibria,
                                  const DetectOptions& opts) {
  (void)p;
  AttractorVerdict v;
  const int comp = infected_index(p.model());
  if (traj.size() < 8) {
    v.diagnostics = "trajectory too short";
    return v;
  }

  // Terminal window (last 10%) pinned to a listed equilibrium.
  std::size_t w10 = window_start(traj, 0.10);
  for (std::size_t e = 0; e < equilibria.size(); ++e) {
    const State& eq = equilibria[e].state;
    double scale = 1.0 + eq.inf_norm();
    double worst = 0.0;
    for (std::size_t i = w10; i < traj.size(); ++i) {
      State s = traj.state(i);
      double dev = 0.0;
      for (int kk = 0; kk < s.dim(); ++kk) dev = std::max(dev, std::fabs(s[kk] - eq[kk]));
      worst = std::max(worst, dev);
    }
    if (worst <= opts.equilibrium_tol * scale) {
      v.kind = AttractorKind::equilibrium;
      v.equilibrium_index = static_cast<int>(e);
      return v;
    }
  }

  RecurrenceMetrics rm = recurrence_metrics(traj, comp, opts.recurrence);
  v.episodes = rm.episodes;
  v.quiescent_fraction = rm.quiescent_fraction;
  if (rm.episodes >= opts.min_episodes &&
      rm.quiescent_fraction >= opts.min_quiescent_fraction) {
    v.kind = AttractorKind::recurrent;
    return v;
  }

  // Regular cycle: evenly spaced peaks of steady height in the tail.
  std::size_t w25 = window_start(traj, 0.25);
  Peaks pk = local_maxima(traj, comp, w25);
  if (pk.t.size() >= 4) {
    double mean_dt = (pk.t.back() - pk.t.front()) / double(pk.t.size() - 1);
    double lo_dt = std::numeric_limits<double>::infinity(), hi_dt = 0;
    for (std::size_t i = 1; i < pk.t.size(); ++i) {
      double dt = pk.t[i] - pk.t[i - 1];
      lo_dt = std::min(lo_dt, dt);
      hi_dt = std::max(hi_dt, dt);
    }
    double jitter = mean_dt > 0 ? (hi_dt - lo_dt) / mean_dt : 1.0;
    double pmin = *std::min_element(pk.v.begin(), pk.v.end());
    double pmax = *std::max_element(pk.v.begin(), pk.v.end());
    double vmax = -std::numeric_limits<double>::infinity(), vmin = -vmax;
    for (std::size_t i = w25; i < traj.size(); ++i) {
      vmax = std::max(vmax, traj.component(i, comp));
      vmin = std::min(vmin, traj.component(i, comp));
    }
    double amp = 0.5 * (vmax - vmin);
    bool steady = (pmax - pmin) <= 0.05 * std::max(1e-12, amp);
    if (jitter < opts.period_jit_max && steady && amp > 1e-6 * (1.0 + std::fabs(vmax))) {
      v.kind = AttractorKind::limit_cycle;
      v.period = mean_dt;
      v.amplitude = amp;
      return v;
    }
    v.diagnostics = "peaks found but jitter " + std::to_string(jitter);
  }
  return v;
}

BistabilityResult bistability_probe(const ParameterSet& p, std::span<const State> ics,
                                    const IntegratorConfig& cfg, const DetectOptions& opts) {
  BistabilityResult r;
  auto equilibria = infected_equilibria(p);
  equilibria.insert(equilibria.begin(), uninfected_equilibrium(p).first);
  for (const State& ic : ics) {
    Trajectory tr = integrate(p, ic, cfg);
    r.verdicts.push_back(detect_attractor(tr, p, equilibria, opts));
  }
  bool any_undecided = false, distinct = false;
  for (std::size_t i = 0; i < r.verdicts.size(); ++i) {
    if (r.verdicts[i].kind == AttractorKind::undecided) any_undecided = true;
    for (std::size_t j = i + 1; j < r.verdicts.size(); ++j) {
      const auto& a = r.verdicts[i];
      const auto& b = r.verdicts[j];
      if (a.kind != b.kind ||
          (a.kind == AttractorKind::equilibrium && a.equilibrium_index != b.equilibrium_index))
        distinct = true;
    }
  }
  if (any_undecided)
    r.flag = BistableFlag::inconclusive;
  else
    r.flag = distinct ? BistableFlag::yes : BistableFlag::no;
  return r;
}

}  // namespace bifurc
