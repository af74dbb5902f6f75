// Command line front end: loads a JSON run configuration, executes one
// analysis command, writes CSV outputs, and reports through exit codes
// (0 ok, 2 bad config, 3 numerical/I-O failure, 4 reference-table mismatch).

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bifurc/csv.hpp"
#include "bifurc/equilibria.hpp"
#include "bifurc/errors.hpp"
#include "bifurc/incidence.hpp"
#include "bifurc/normal_form.hpp"
#include "bifurc/report.hpp"
#include "bifurc/scan.hpp"
#include "bifurc/simulate.hpp"
#include "bifurc/spectral.hpp"

namespace fs = std::filesystem;
using namespace bifurc;

namespace {

struct CliArgs {
  std::string command;
  std::string config;
  std::string out_dir = ".";
  std::string table;
  int case_n = -1;
  bool strict = false;
};

std::vector<std::string> g_warnings;

void warn(const std::string& msg) {
  g_warnings.push_back(msg);
  std::fprintf(stderr, "warning: %s\n", msg.c_str());
}

fs::path out_path(const CliArgs& args, const RunOptions& opt, const char* fallback) {
  fs::path dir(args.out_dir);
  return dir / (opt.out ? *opt.out : fallback);
}

const char* verdict_str(const AttractorVerdict& v) {
  switch (v.kind) {
    case AttractorKind::equilibrium: return "equilibrium";
    case AttractorKind::limit_cycle: return "limit_cycle";
    case AttractorKind::recurrent: return "recurrent";
    case AttractorKind::undecided: return "undecided";
  }
  return "undecided";
}

State make_state(const std::vector<double>& v, ModelId m) {
  if (static_cast<int>(v.size()) != dimension(m))
    throw ConfigError("initial condition needs " + std::to_string(dimension(m)) +
                      " components");
  return v.size() == 2 ? State(v[0], v[1]) : State(v[0], v[1], v[2]);
}

IntegratorConfig integrator_from(const RunOptions& o, ModelId m) {
  IntegratorConfig cfg;
  cfg.t_end = o.t_end.value_or(default_t_end(m));
  if (o.rel_tol) cfg.rel_tol = *o.rel_tol;
  if (o.abs_tol) cfg.abs_tol = *o.abs_tol;
  if (o.max_step) cfg.max_step = *o.max_step;
  if (o.sample_interval) cfg.sample_interval = *o.sample_interval;
  return cfg;
}

int cmd_equilibria(const CliArgs& args, const RunConfig& cfg) {
  const ParameterSet& p = *cfg.params;
  auto [e0, r0] = uninfected_equilibrium(p);
  auto rep0 = stability(p, e0.state);
  std::printf("uninfected: state=(");
  for (int i = 0; i < e0.state.dim(); ++i)
    std::printf("%s%.10g", i ? ", " : "", e0.state[i]);
  std::printf(") threshold=%.10g stability=%s\n", r0,
              std::string(stability_name(rep0.cls)).c_str());
  for (const auto& e : infected_equilibria(p)) {
    auto rep = stability(p, e.state);
    std::printf("%s: state=(", std::string(branch_tag_name(e.branch)).c_str());
    for (int i = 0; i < e.state.dim(); ++i) std::printf("%s%.10g", i ? ", " : "", e.state[i]);
    std::printf(") feasible=%s stability=%s\n", e.feasible ? "yes" : "no",
                std::string(stability_name(rep.cls)).c_str());
  }
  if (cfg.options.out) {
    double b = p.bif_value();
    emit_diagram(sweep_branch(p, b, b, 1), p.model(), out_path(args, cfg.options, "equilibria.csv"));
  }
  return 0;
}

int cmd_sweep(const CliArgs& args, const RunConfig& cfg, bool annotated) {
  const ParameterSet& p = *cfg.params;
  if (!cfg.options.param_range) throw ConfigError("option 'param_range' is required");
  int samples = cfg.options.samples.value_or(201);
  HopfSearchOptions hopts;
  hopts.feasible_only = cfg.options.feasible_only;
  if (cfg.options.state_max) hopts.state_max = *cfg.options.state_max;
  BranchDiagram d = sweep_branch(p, cfg.options.param_range->first,
                                 cfg.options.param_range->second, samples,
                                 cfg.options.geometric, hopts);
  fs::path file = out_path(args, cfg.options, "diagram.csv");
  emit_diagram(d, p.model(), file);
  std::printf("diagram: %zu rows, %zu bifurcation points -> %s\n", d.samples.size(),
              d.bifurcations.size(), file.string().c_str());
  if (annotated) {
    fs::path bfile = fs::path(args.out_dir) / "bifurcations.csv";
    std::string text = "param,kind";
    for (int i = 1; i <= dimension(p.model()); ++i)
      text += ",state_" + std::to_string(i);
    text += ",omega_c\n";
    char buf[512];
    for (const auto& b : d.bifurcations) {
      std::snprintf(buf, sizeof buf, "%.17g,%s", b.param_value,
                    std::string(bif_kind_name(b.kind)).c_str());
      text += buf;
      for (int i = 0; i < b.state.dim(); ++i) {
        std::snprintf(buf, sizeof buf, ",%.17g", b.state[i]);
        text += buf;
      }
      if (b.omega_c)
        std::snprintf(buf, sizeof buf, ",%.17g\n", *b.omega_c);
      else
        std::snprintf(buf, sizeof buf, ",\n");
      text += buf;
    }
    write_text_atomic(bfile, text);
    std::printf("bifurcations: %zu points -> %s\n", d.bifurcations.size(),
                bfile.string().c_str());
  }
  return 0;
}

int cmd_hopf(const CliArgs&, const RunConfig& cfg) {
  const ParameterSet& p = *cfg.params;
  BifurcationPoint tc = find_transcritical(p);
  std::printf("transcritical: param=%.10g\n", tc.param_value);
  TurningPoint tp = turning_point(p);
  if (tp.exists)
    std::printf("turning: param=%.10g state=%.10g\n", tp.param_value,
                tp.state[infected_index(p.model())]);
  else
    std::printf("turning: none\n");
  HopfSearchOptions hopts;
  hopts.feasible_only = cfg.options.feasible_only;
  if (cfg.options.state_max) hopts.state_max = *cfg.options.state_max;
  auto points = find_hopf(p, hopts);
  for (const auto& b : points) {
    std::printf("%s: param=%.10g state=%.10g", std::string(bif_kind_name(b.kind)).c_str(),
                b.param_value, b.state[infected_index(p.model())]);
    if (b.omega_c) std::printf(" omega_c=%.10g", *b.omega_c);
    std::printf("\n");
  }
  if (points.empty()) std::printf("hopf: none found\n");
  return 0;
}

int cmd_normalform(const CliArgs&, const RunConfig& cfg) {
  const ParameterSet& p = *cfg.params;
  HopfSearchOptions hopts;
  hopts.feasible_only = cfg.options.feasible_only;
  if (cfg.options.state_max) hopts.state_max = *cfg.options.state_max;
  auto points = find_hopf(p, hopts);
  bool any = false;
  for (const auto& b : points) {
    if (b.kind != BifKind::hopf) continue;
    any = true;
    if (dimension(p.model()) == 2) {
      HopfData h = hopf_normal_form(p, b);
      std::printf("hopf param=%.10g: d=%.6g a=%.6g omega_c=%.6g class=(%c) %s, %s cycle\n",
                  b.param_value, h.d, h.a, h.omega_c, h.table_class,
                  h.criticality == Criticality::supercritical ? "supercritical"
                                                              : "subcritical",
                  h.cycle_stability == CycleStability::stable ? "stable" : "unstable");
    } else {
      ProbeResult r = simulation_probe(p, b);
      const char* s = r == ProbeResult::supercritical  ? "supercritical"
                      : r == ProbeResult::subcritical  ? "subcritical"
                                                       : "undecided";
      if (r == ProbeResult::undecided) warn("criticality probe undecided");
      std::printf("hopf param=%.10g: criticality=%s (simulation probe)\n", b.param_value, s);
    }
  }
  if (!any) std::printf("normalform: no hopf points found\n");
  return 0;
}

int cmd_simulate(const CliArgs& args, const RunConfig& cfg) {
  const ParameterSet& p = *cfg.params;
  if (!cfg.options.ic) throw ConfigError("option 'ic' is required for simulate");
  State ic = make_state(*cfg.options.ic, p.model());
  IntegratorConfig icfg = integrator_from(cfg.options, p.model());
  Trajectory tr = integrate(p, ic, icfg);
  auto eqs = infected_equilibria(p);
  eqs.insert(eqs.begin(), uninfected_equilibrium(p).first);
  AttractorVerdict v = detect_attractor(tr, p, eqs);
  if (v.kind == AttractorKind::undecided) warn("attractor verdict undecided");
  RecurrenceMetrics rm = recurrence_metrics(tr, infected_index(p.model()));
  fs::path file = out_path(args, cfg.options, "trajectory.csv");
  emit_trajectory(tr, file, cfg.options.downsample.value_or(1));
  std::printf("simulate: t_end=%.10g steps=%ld verdict=%s episodes=%d quiescent=%.4g -> %s\n",
              icfg.t_end, tr.stats.accepted, verdict_str(v), rm.episodes,
              rm.quiescent_fraction, file.string().c_str());
  return 0;
}

int cmd_classify(const CliArgs& args, const RunConfig& cfg) {
  const ParameterSet& p = *cfg.params;
  BifShape shape = classify_bifurcation_shape(p);
  const char* sname = shape == BifShape::forward             ? "forward"
                      : shape == BifShape::backward_positive ? "backward_positive"
                      : shape == BifShape::backward_negative ? "backward_negative"
                                                             : "none";
  std::printf("bifurcation_shape: %s\n", sname);

  if (p.model() != ModelId::autoimmune_2d && p.model() != ModelId::autoimmune_3d) {
    IncidenceCurve curve;
    if (cfg.options.curve) {
      auto c = incidence_curve_from_name(*cfg.options.curve);
      if (!c) throw ConfigError("unknown incidence curve '" + *cfg.options.curve + "'");
      curve = *c;
    } else {
      curve = p.model() == ModelId::inhost_convex    ? IncidenceCurve::convex_on_branch
              : p.model() == ModelId::sir_treatment ? IncidenceCurve::treatment_adjusted
                                                    : IncidenceCurve::saturating;
    }
    double host = cfg.options.fixed_host.value_or(uninfected_equilibrium(p).first.state[0]);
    ShapeReport rep = shape_classify(curve, p, host, cfg.options.grid_max.value_or(1e3),
                                     cfg.options.ray_slope);
    const char* cname = rep.concavity == Concavity::concave  ? "concave"
                        : rep.concavity == Concavity::convex ? "convex"
                                                             : "convex_concave";
    std::printf("incidence %s (host=%.6g): %s", std::string(incidence_curve_name(curve)).c_str(),
                host, cname);
    if (rep.inflection) std::printf(" inflection=%.8g", *rep.inflection);
    std::printf(" ray_slope=%.6g intersections=%zu [", rep.ray_slope, rep.ray_hits.size());
    for (std::size_t i = 0; i < rep.ray_hits.size(); ++i)
      std::printf("%s%.8g", i ? ", " : "", rep.ray_hits[i]);
    std::printf("]\n");
  }

  if (cfg.options.ics.size() >= 2) {
    std::vector<State> ics;
    for (const auto& v : cfg.options.ics) ics.push_back(make_state(v, p.model()));
    auto res = bistability_probe(p, ics, integrator_from(cfg.options, p.model()));
    const char* fl = res.flag == BistableFlag::yes            ? "bistable"
                     : res.flag == BistableFlag::no           ? "monostable"
                                                              : "inconclusive";
    if (res.flag == BistableFlag::inconclusive) warn("bistability probe inconclusive");
    std::printf("bistability: %s (", fl);
    for (std::size_t i = 0; i < res.verdicts.size(); ++i)
      std::printf("%s%s", i ? ", " : "", verdict_str(res.verdicts[i]));
    std::printf(")\n");
  }
  (void)args;
  return 0;
}

int cmd_reproduce(const CliArgs& args, const RunConfig& cfg) {
  std::string table = !args.table.empty() ? args.table : cfg.options.table.value_or("");
  if (table.empty()) throw ConfigError("reproduce needs --table or option 'table'");
  int case_n = args.case_n >= 0 ? args.case_n : cfg.options.case_id.value_or(-1);
  std::optional<fs::path> golden;
  if (cfg.options.golden_path) golden = fs::path(*cfg.options.golden_path);
  TableReport rep = reproduce_table(table, case_n, cfg.options.run_dynamics, golden);
  std::fputs(render_table_report(rep).c_str(), stdout);
  write_table_report_csv(rep, fs::path(args.out_dir) / ("reproduce_" + table + ".csv"));
  return rep.pass ? 0 : 4;
}

int dispatch(const CliArgs& args) {
  RunConfig cfg = parse_run_config(args.config, args.command);
  int rc = 0;
  if (args.command == "equilibria") rc = cmd_equilibria(args, cfg);
  else if (args.command == "sweep") rc = cmd_sweep(args, cfg, false);
  else if (args.command == "diagram") rc = cmd_sweep(args, cfg, true);
  else if (args.command == "hopf") rc = cmd_hopf(args, cfg);
  else if (args.command == "normalform") rc = cmd_normalform(args, cfg);
  else if (args.command == "simulate") rc = cmd_simulate(args, cfg);
  else if (args.command == "classify") rc = cmd_classify(args, cfg);
  else if (args.command == "reproduce") rc = cmd_reproduce(args, cfg);
  if (rc == 0 && args.strict && !g_warnings.empty()) {
    std::fprintf(stderr, "error: %zu warning(s) escalated by --strict\n", g_warnings.size());
    return 3;
  }
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bifurc: equilibria, bifurcations, and simulated regimes of small disease models"};
  app.require_subcommand(1);
  CliArgs args;

  const std::pair<const char*, const char*> cmds[] = {
      {"equilibria", "closed-form equilibria and their stability"},
      {"sweep", "sample equilibria and stability over a parameter interval"},
      {"diagram", "sweep plus a separate bifurcation-point table"},
      {"hopf", "transcritical, turning, and Hopf points"},
      {"normalform", "Hopf normal-form coefficients and classification"},
      {"simulate", "integrate a trajectory and classify the attractor"},
      {"classify", "bifurcation shape, incidence geometry, bistability probe"},
      {"reproduce", "recompute a bundled reference table and compare"},
  };
  for (auto [name, desc] : cmds) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", args.config, "JSON run configuration")->required();
    sub->add_option("--out", args.out_dir, "output directory");
    sub->add_flag("--strict", args.strict, "escalate warnings to failures");
    if (std::string(name) == "reproduce") {
      sub->add_option("--table", args.table, "reference table id (T1|T2|T4)")
          ->check(CLI::IsMember({"T1", "T2", "T4"}));
      sub->add_option("--case", args.case_n, "restrict to one case");
    }
    sub->callback([&args, name = std::string(name)] { args.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? 2 : 0;
  }

  try {
    return dispatch(args);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "domain error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
