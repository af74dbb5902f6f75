#include "bifurc/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "bifurc/csv.hpp"
#include "bifurc/equilibria.hpp"
#include "bifurc/errors.hpp"
#include "bifurc/normal_form.hpp"
#include "bifurc/scan.hpp"
#include "bifurc/simulate.hpp"
#include "bifurc/spectral.hpp"
#include "golden_tables_data.hpp"
#include "json.hpp"

namespace bifurc {

using nlohmann::json;

const std::string& golden_tables_text() {
  static const std::string text = detail::kGoldenTablesJson;
  return text;
}

namespace {

std::string fmt_num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 9);
  return std::string(buf, res.ptr);
}

json load_golden(const std::optional<std::filesystem::path>& override_path) {
  if (override_path) {
    std::ifstream in(*override_path);
    if (!in) throw ConfigError("cannot open golden table file '" + override_path->string() + "'");
    return json::parse(in);
  }
  return json::parse(golden_tables_text());
}

// ---- run configuration ------------------------------------------------------

const std::set<std::string> kCommands = {"equilibria", "sweep", "hopf", "normalform",
                                         "simulate", "classify", "reproduce", "diagram"};

const std::map<std::string, std::set<std::string>> kAllowedOptions = {
    {"equilibria", {"out"}},
    {"sweep", {"param_range", "samples", "geometric", "out", "feasible_only", "state_max"}},
    {"diagram", {"param_range", "samples", "geometric", "out", "feasible_only", "state_max"}},
    {"hopf", {"feasible_only", "state_max", "out"}},
    {"normalform", {"feasible_only", "state_max", "out"}},
    {"simulate",
     {"ic", "t_end", "rel_tol", "abs_tol", "max_step", "sample_interval", "out", "downsample"}},
    {"classify",
     {"ics", "t_end", "rel_tol", "abs_tol", "curve", "fixed_host", "grid_max", "ray_slope", "out"}},
    {"reproduce", {"table", "case", "golden_path", "out", "dynamics"}},
};

double want_number(const json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError("option '" + key + "' must be a number");
  return j.get<double>();
}

int want_int(const json& j, const std::string& key) {
  if (!j.is_number_integer()) throw ConfigError("option '" + key + "' must be an integer");
  return j.get<int>();
}

std::vector<double> want_vector(const json& j, const std::string& key) {
  if (!j.is_array()) throw ConfigError("option '" + key + "' must be an array of numbers");
  std::vector<double> v;
  for (const auto& e : j) v.push_back(want_number(e, key));
  return v;
}

}  // namespace

RunConfig parse_run_config(const std::filesystem::path& path, const std::string& cli_command) {
  if (!kCommands.count(cli_command))
    throw ConfigError("unknown command '" + cli_command + "'");
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  if (!j.is_object()) throw ConfigError("config root must be an object");
  for (const auto& [key, _] : j.items())
    if (key != "model" && key != "params" && key != "command" && key != "options")
      throw ConfigError("unknown top-level key '" + key + "'");

  RunConfig cfg;
  cfg.command = cli_command;
  if (j.contains("command")) {
    if (!j["command"].is_string()) throw ConfigError("key 'command' must be a string");
    std::string file_cmd = j["command"].get<std::string>();
    if (file_cmd != cli_command)
      throw ConfigError("config key 'command' is '" + file_cmd +
                        "' but the invoked command is '" + cli_command + "'");
  }

  if (j.contains("model")) {
    if (!j["model"].is_string()) throw ConfigError("key 'model' must be a string");
    auto m = model_from_name(j["model"].get<std::string>());
    if (!m) throw ConfigError("unknown model '" + j["model"].get<std::string>() + "'");
    cfg.model = *m;
  }
  if (j.contains("params")) {
    if (!cfg.model) throw ConfigError("key 'params' given without 'model'");
    if (!j["params"].is_object()) throw ConfigError("key 'params' must be an object");
    std::vector<std::pair<std::string, double>> kv;
    for (const auto& [key, val] : j["params"].items())
      kv.emplace_back(key, want_number(val, key));
    try {
      cfg.params = ParameterSet::from_named(*cfg.model, kv);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (cli_command != "reproduce" && (!cfg.model || !cfg.params))
    throw ConfigError("command '" + cli_command + "' requires 'model' and 'params'");

  const auto& allowed = kAllowedOptions.at(cli_command);
  if (j.contains("options")) {
    if (!j["options"].is_object()) throw ConfigError("key 'options' must be an object");
    for (const auto& [key, val] : j["options"].items()) {
      if (!allowed.count(key))
        throw ConfigError("unknown option '" + key + "' for command '" + cli_command + "'");
      RunOptions& o = cfg.options;
      if (key == "ic") {
        o.ic = want_vector(val, key);
      } else if (key == "ics") {
        if (!val.is_array()) throw ConfigError("option 'ics' must be an array of arrays");
        for (const auto& e : val) o.ics.push_back(want_vector(e, key));
      } else if (key == "t_end") {
        o.t_end = want_number(val, key);
      } else if (key == "rel_tol") {
        o.rel_tol = want_number(val, key);
      } else if (key == "abs_tol") {
        o.abs_tol = want_number(val, key);
      } else if (key == "max_step") {
        o.max_step = want_number(val, key);
      } else if (key == "sample_interval") {
        o.sample_interval = want_number(val, key);
      } else if (key == "param_range") {
        auto v = want_vector(val, key);
        if (v.size() != 2) throw ConfigError("option 'param_range' must be [lo, hi]");
        o.param_range = {v[0], v[1]};
      } else if (key == "samples") {
        o.samples = want_int(val, key);
      } else if (key == "geometric") {
        if (!val.is_boolean()) throw ConfigError("option 'geometric' must be a boolean");
        o.geometric = val.get<bool>();
      } else if (key == "out") {
        if (!val.is_string()) throw ConfigError("option 'out' must be a string");
        o.out = val.get<std::string>();
      } else if (key == "table") {
        if (!val.is_string()) throw ConfigError("option 'table' must be a string");
        o.table = val.get<std::string>();
      } else if (key == "case") {
        o.case_id = want_int(val, key);
      } else if (key == "feasible_only") {
        if (!val.is_boolean()) throw ConfigError("option 'feasible_only' must be a boolean");
        o.feasible_only = val.get<bool>();
      } else if (key == "state_max") {
        o.state_max = want_number(val, key);
      } else if (key == "golden_path") {
        if (!val.is_string()) throw ConfigError("option 'golden_path' must be a string");
        o.golden_path = val.get<std::string>();
      } else if (key == "curve") {
        if (!val.is_string()) throw ConfigError("option 'curve' must be a string");
        o.curve = val.get<std::string>();
      } else if (key == "fixed_host") {
        o.fixed_host = want_number(val, key);
      } else if (key == "grid_max") {
        o.grid_max = want_number(val, key);
      } else if (key == "ray_slope") {
        o.ray_slope = want_number(val, key);
      } else if (key == "downsample") {
        o.downsample = want_int(val, key);
      } else if (key == "dynamics") {
        if (!val.is_boolean()) throw ConfigError("option 'dynamics' must be a boolean");
        o.run_dynamics = val.get<bool>();
      }
    }
  }
  return cfg;
}

// ---- golden table reproduction -----------------------------------------------

namespace {

struct CellSink {
  CaseReport* rep;
  void numeric(const std::string& name, double expected, double computed, double tol) {
    CellCheck c;
    c.name = name;
    c.expected = fmt_num(expected);
    c.computed = fmt_num(computed);
    c.tol = tol;
    if (std::isinf(expected))
      c.pass = std::isinf(computed) && (computed > 0) == (expected > 0);
    else
      c.pass = std::isfinite(computed) && std::fabs(computed - expected) <= tol;
    rep->cells.push_back(c);
    if (!c.pass) rep->pass = false;
  }
  void relative(const std::string& name, double expected, double computed, double rel) {
    CellCheck c;
    c.name = name;
    c.expected = fmt_num(expected);
    c.computed = fmt_num(computed);
    c.tol = rel;
    c.pass = std::isfinite(computed) &&
             std::fabs(computed - expected) <= rel * std::fabs(expected);
    rep->cells.push_back(c);
    if (!c.pass) rep->pass = false;
  }
  void label(const std::string& name, const std::string& expected, const std::string& computed) {
    CellCheck c;
    c.name = name;
    c.expected = expected;
    c.computed = computed;
    c.pass = expected == computed;
    rep->cells.push_back(c);
    if (!c.pass) rep->pass = false;
  }
};

ParameterSet table_params(const json& tab, double case_value) {
  auto model = model_from_name(tab["model"].get<std::string>());
  std::vector<std::pair<std::string, double>> kv;
  for (const auto& [key, val] : tab["fixed"].items()) kv.emplace_back(key, val.get<double>());
  if (tab.contains("case_param"))
    kv.emplace_back(tab["case_param"].get<std::string>(), case_value);
  std::string bif_name(param_names(*model)[static_cast<std::size_t>(bif_param_index(*model))]);
  kv.emplace_back(bif_name, tab["placeholder_bif_value"].get<double>());
  return ParameterSet::from_named(*model, kv);
}

std::string verdict_name(const AttractorVerdict& v) {
  switch (v.kind) {
    case AttractorKind::equilibrium: return "equilibrium";
    case AttractorKind::limit_cycle: return "limit_cycle";
    case AttractorKind::recurrent: return "recurrent";
    case AttractorKind::undecided: return "undecided";
  }
  return "undecided";
}

void check_dynamics(CellSink& sink, const ParameterSet& base, const json& probes) {
  int idx = bif_param_index(base.model());
  int probe_no = 0;
  for (const auto& pr : probes) {
    ++probe_no;
    std::string want = pr["verdict"].get<std::string>();
    double pv = pr["param_value"].get<double>();
    ParameterSet p = base.with(idx, pv);
    IntegratorConfig cfg;
    cfg.t_end = pr.contains("t_end") ? pr["t_end"].get<double>() : default_t_end(p.model());
    std::vector<State> ics;
    for (const auto& icj : pr["ics"]) {
      auto v = icj.get<std::vector<double>>();
      ics.push_back(v.size() == 2 ? State(v[0], v[1]) : State(v[0], v[1], v[2]));
    }
    std::string tag = "dynamics." + std::to_string(probe_no) + "@" + fmt_num(pv);
    if (want == "bistable") {
      auto res = bistability_probe(p, ics, cfg);
      std::string got = res.flag == BistableFlag::yes            ? "bistable"
                        : res.flag == BistableFlag::inconclusive ? "inconclusive"
                                                                 : "monostable";
      sink.label(tag, "bistable", got);
      continue;
    }
    auto equilibria = infected_equilibria(p);
    equilibria.insert(equilibria.begin(), uninfected_equilibrium(p).first);
    for (const State& ic : ics) {
      Trajectory tr = integrate(p, ic, cfg);
      AttractorVerdict v = detect_attractor(tr, p, equilibria);
      sink.label(tag, want, verdict_name(v));
    }
  }
}

void reproduce_t1_t2(const json& tab, int case_filter, bool with_dynamics,
                     TableReport& out) {
  const json& tol = tab["tol"];
  ModelId model = *model_from_name(tab["model"].get<std::string>());
  int inf_idx = infected_index(model);

  {
    CaseReport common;
    common.id = "common";
    CellSink sink{&common};
    ParameterSet p = table_params(tab, tab["cases"][0]["value"].get<double>());
    BifurcationPoint tc = find_transcritical(p);
    sink.numeric("transcritical.param", tab["transcritical"]["param"].get<double>(),
                 tc.param_value, std::max(tab["transcritical"]["tol"].get<double>(), 1e-12));
    sink.numeric("transcritical.state", 0.0, tc.state[inf_idx], 1e-12);
    out.cases.push_back(common);
  }

  for (const auto& cs : tab["cases"]) {
    int case_no = cs["case"].get<int>();
    if (case_filter >= 0 && case_no != case_filter) continue;
    CaseReport rep;
    rep.id = std::to_string(case_no);
    CellSink sink{&rep};
    ParameterSet p = table_params(tab, cs["value"].get<double>());

    TurningPoint tp = turning_point(p);
    if (cs["turning"].is_null()) {
      sink.label("turning.exists", "none", tp.exists ? "fold" : "none");
    } else {
      sink.label("turning.exists", "fold", tp.exists ? "fold" : "none");
      if (tp.exists) {
        sink.numeric("turning.param", cs["turning"]["param"].get<double>(), tp.param_value,
                     tol["turning_param"].get<double>());
        sink.numeric("turning.state", cs["turning"]["state"].get<double>(),
                     tp.state[inf_idx], tol["turning_state"].get<double>());
      }
    }

    bool eliminate = model == ModelId::inhost_convex;
    HIndicator h = h_indicator(p, 1.0, eliminate);
    if (h.negativity) {
      sink.numeric("h.lo", cs["h_negativity"]["lo"].get<double>(), h.negativity->first,
                   tol["interval"].get<double>());
      double want_hi = cs["h_negativity"]["hi"].is_string()
                           ? std::numeric_limits<double>::infinity()
                           : cs["h_negativity"]["hi"].get<double>();
      sink.numeric("h.hi", want_hi, h.negativity->second, tol["interval"].get<double>());
    } else {
      sink.label("h.window", "present", "absent");
    }

    auto found = find_hopf(p);
    if (tab.value("candidates_kind", "all") == std::string("hopf_only"))
      std::erase_if(found, [](const BifurcationPoint& b) { return b.kind != BifKind::hopf; });
    const auto& want = cs["candidates"];
    sink.numeric("candidates.count", double(want.size()), double(found.size()), 0.0);
    for (std::size_t i = 0; i < want.size() && i < found.size(); ++i) {
      std::string base = "candidate." + std::to_string(i + 1);
      sink.numeric(base + ".param", want[i]["param"].get<double>(), found[i].param_value,
                   tol["hopf_param"].get<double>());
      sink.numeric(base + ".state", want[i]["state"].get<double>(),
                   found[i].state[inf_idx], tol["hopf_state"].get<double>());
      sink.label(base + ".kind", want[i]["kind"].get<std::string>(),
                 std::string(bif_kind_name(found[i].kind)));
    }

    if (cs.contains("infeasible_candidates")) {
      HopfSearchOptions opts;
      opts.feasible_only = false;
      auto all = find_hopf(p, opts);
      for (const auto& wc : cs["infeasible_candidates"]) {
        double wp = wc["param"].get<double>();
        const BifurcationPoint* best = nullptr;
        for (const auto& f : all)
          if (f.state[inf_idx] < 0 &&
              (!best || std::fabs(f.param_value - wp) < std::fabs(best->param_value - wp)))
            best = &f;
        if (!best) {
          sink.label("infeasible.kind", wc["kind"].get<std::string>(), "missing");
        } else {
          sink.numeric("infeasible.param", wp, best->param_value,
                       tol["hopf_param"].get<double>());
          sink.numeric("infeasible.state", wc["state"].get<double>(), best->state[inf_idx],
                       tol["hopf_state"].get<double>());
          sink.label("infeasible.kind", wc["kind"].get<std::string>(),
                     std::string(bif_kind_name(best->kind)));
        }
      }
    }

    if (with_dynamics && cs.contains("dynamics")) check_dynamics(sink, p, cs["dynamics"]);
    out.cases.push_back(rep);
  }
}

void reproduce_t4(const json& tab, int case_filter, TableReport& out) {
  const json& tol = tab["tol"];
  for (const auto& row : tab["rows"]) {
    if (case_filter >= 0) {
      // numeric filter matches the leading case digit (5 selects 5a and 5b)
      std::string id = row["case"].get<std::string>();
      std::string want = std::to_string(case_filter);
      if (id.substr(0, want.size()) != want) continue;
    }
    CaseReport rep;
    rep.id = row["case"].get<std::string>();
    CellSink sink{&rep};
    std::vector<std::pair<std::string, double>> kv;
    for (const auto& [key, val] : tab["fixed"].items())
      kv.emplace_back(key, val.get<double>());
    kv.emplace_back("A", row["A"].get<double>());
    kv.emplace_back("B", 0.05);
    ParameterSet p = ParameterSet::from_named(ModelId::inhost_convex, kv);

    double wp = row["hopf_param"].get<double>();
    auto found = find_hopf(p);
    const BifurcationPoint* best = nullptr;
    for (const auto& f : found)
      if (f.kind == BifKind::hopf &&
          (!best || std::fabs(f.param_value - wp) < std::fabs(best->param_value - wp)))
        best = &f;
    if (!best) {
      sink.label("hopf", "found", "missing");
      out.cases.push_back(rep);
      continue;
    }
    sink.numeric("hopf.param", wp, best->param_value, tol["hopf_param"].get<double>());
    sink.numeric("hopf.state", row["hopf_state"].get<double>(), best->state[1],
                 tol["hopf_state"].get<double>());

    HopfData h = hopf_normal_form(p, *best);
    double wd = row["d"].get<double>(), wa = row["a"].get<double>();
    sink.label("d.sign", wd > 0 ? "+" : "-", h.d > 0 ? "+" : "-");
    sink.relative("d.magnitude", wd, h.d, tol["d_rel"].get<double>());
    sink.label("a.sign", wa > 0 ? "+" : "-", h.a > 0 ? "+" : "-");
    sink.relative("a.magnitude", wa, h.a, tol["a_rel"].get<double>());
    sink.label("class", row["class"].get<std::string>(), std::string(1, h.table_class));
    sink.label("cycle", row["cycle"].get<std::string>(),
               h.cycle_stability == CycleStability::stable ? "stable" : "unstable");
    out.cases.push_back(rep);
  }
}

void reproduce_s4(const json& tab, bool with_dynamics, TableReport& out) {
  CaseReport rep;
  rep.id = "autoimmune";
  CellSink sink{&rep};
  std::vector<std::pair<std::string, double>> kv;
  for (const auto& [key, val] : tab["params"].items()) kv.emplace_back(key, val.get<double>());
  ParameterSet p = ParameterSet::from_named(ModelId::autoimmune_3d, kv);

  BifurcationPoint tc = find_transcritical(p);
  sink.numeric("transcritical.param", tab["transcritical"]["param"].get<double>(),
               tc.param_value, tab["transcritical"]["tol"].get<double>());

  TurningPoint tp = turning_point(p);
  sink.label("turning.exists", "fold", tp.exists ? "fold" : "none");
  if (tp.exists) {
    sink.numeric("turning.param", tab["turning"]["param"].get<double>(), tp.param_value,
                 tab["turning"]["tol"].get<double>());
    sink.numeric("turning.state", tab["turning"]["state"].get<double>(), tp.state[0],
                 tab["turning"]["tol"].get<double>());
  }

  auto found = find_hopf(p);
  const BifurcationPoint* hopf = nullptr;
  for (const auto& f : found)
    if (f.kind == BifKind::hopf) hopf = &f;
  sink.label("hopf.found", "yes", hopf ? "yes" : "no");
  if (hopf) {
    double rel = tab["hopf"]["tol_rel"].get<double>();
    sink.relative("hopf.param", tab["hopf"]["param"].get<double>(), hopf->param_value, rel);
    sink.relative("hopf.state", tab["hopf"]["state"].get<double>(), hopf->state[0], rel);

    if (with_dynamics && tab.contains("dynamics")) {
      json probes = json::array();
      for (auto pr : tab["dynamics"]) {
        if (pr.contains("param_offset_from_hopf")) {
          pr["param_value"] = hopf->param_value + pr["param_offset_from_hopf"].get<double>();
          pr.erase("param_offset_from_hopf");
        }
        probes.push_back(pr);
      }
      check_dynamics(sink, p, probes);
    }
  }
  out.cases.push_back(rep);
}

}  // namespace

TableReport reproduce_table(const std::string& table_id, int case_filter, bool with_dynamics,
                            const std::optional<std::filesystem::path>& golden_override) {
  json g = load_golden(golden_override);
  if (!g.contains(table_id)) throw ConfigError("unknown table '" + table_id + "'");
  TableReport out;
  out.table_id = table_id;
  const json& tab = g[table_id];
  if (table_id == "T1" || table_id == "T2")
    reproduce_t1_t2(tab, case_filter, with_dynamics, out);
  else if (table_id == "T4")
    reproduce_t4(tab, case_filter, out);
  else if (table_id == "S4")
    reproduce_s4(tab, with_dynamics, out);
  else
    throw ConfigError("table '" + table_id + "' has no reproduction recipe");

  for (const auto& c : out.cases) {
    for (const auto& cell : c.cells) {
      ++out.cells_total;
      if (!cell.pass) ++out.cells_failed;
    }
    if (!c.pass) out.pass = false;
  }
  return out;
}

std::string render_table_report(const TableReport& r) {
  std::ostringstream os;
  for (const auto& c : r.cases) {
    for (const auto& cell : c.cells) {
      os << '[' << r.table_id << " case " << c.id << "] " << cell.name;
      for (std::size_t i = cell.name.size(); i < 22; ++i) os << ' ';
      os << " expected " << cell.expected << "  computed " << cell.computed;
      if (cell.tol > 0) os << "  tol " << fmt_num(cell.tol);
      os << (cell.pass ? "  PASS" : "  FAIL") << '\n';
    }
  }
  os << r.table_id << ": " << (r.cells_total - r.cells_failed) << '/' << r.cells_total
     << " cells pass\n";
  return os.str();
}

void write_table_report_csv(const TableReport& r, const std::filesystem::path& path) {
  std::ostringstream os;
  os << "table,case,cell,expected,computed,tol,pass\n";
  for (const auto& c : r.cases)
    for (const auto& cell : c.cells)
      os << r.table_id << ',' << c.id << ',' << cell.name << ',' << cell.expected << ','
         << cell.computed << ',' << fmt_num(cell.tol) << ',' << (cell.pass ? "1" : "0")
         << '\n';
  write_text_atomic(path, os.str());
}

}  // namespace bifurc
