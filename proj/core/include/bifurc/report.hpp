#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bifurc/models.hpp"

namespace bifurc {

// Options accepted by the run commands. Which fields are allowed depends on
// the command; parse_run_config rejects anything else by name.
struct RunOptions {
  std::optional<std::vector<double>> ic;
  std::vector<std::vector<double>> ics;
  std::optional<double> t_end;
  std::optional<double> rel_tol;
  std::optional<double> abs_tol;
  std::optional<double> max_step;
  std::optional<double> sample_interval;
  std::optional<std::pair<double, double>> param_range;
  std::optional<int> samples;
  bool geometric = false;
  std::optional<std::string> out;
  std::optional<std::string> table;
  std::optional<int> case_id;
  bool feasible_only = true;
  std::optional<double> state_max;
  std::optional<std::string> golden_path;
  std::optional<std::string> curve;
  std::optional<double> fixed_host;
  std::optional<double> grid_max;
  std::optional<double> ray_slope;
  std::optional<int> downsample;
  bool run_dynamics = true;
};

struct RunConfig {
  std::optional<ModelId> model;
  std::optional<ParameterSet> params;
  std::string command;
  RunOptions options;
};

// Parses and schema-validates a JSON run configuration. The file's optional
// `command` key must match the subcommand given on the command line. Unknown
// keys at any level raise ConfigError naming the key. `model`/`params` are
// required for every command except reproduce.
RunConfig parse_run_config(const std::filesystem::path& path, const std::string& cli_command);

struct CellCheck {
  std::string name;
  std::string expected;
  std::string computed;
  double tol = 0;  // 0 for exact or categorical cells
  bool pass = false;
};

struct CaseReport {
  std::string id;
  std::vector<CellCheck> cells;
  bool pass = true;
};

struct TableReport {
  std::string table_id;
  std::vector<CaseReport> cases;
  bool pass = true;
  int cells_total = 0;
  int cells_failed = 0;
};

// Recomputes one golden table ("T1", "T2", "T4", or the point set "S4") and
// compares cell by cell at the recorded tolerances. case_filter < 0 runs all
// cases. The dynamics probes integrate the quoted simulation runs and check
// the categorical verdicts; they dominate the runtime and can be skipped.
TableReport reproduce_table(const std::string& table_id, int case_filter = -1,
                            bool with_dynamics = true,
                            const std::optional<std::filesystem::path>& golden_override = {});

std::string render_table_report(const TableReport& r);
void write_table_report_csv(const TableReport& r, const std::filesystem::path& path);

// Raw JSON text of the built-in golden tables; tests parse this directly.
const std::string& golden_tables_text();

}  // namespace bifurc
