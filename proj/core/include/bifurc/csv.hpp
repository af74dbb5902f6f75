#pragma once

#include <filesystem>
#include <string>

#include "bifurc/scan.hpp"
#include "bifurc/simulate.hpp"

namespace bifurc {

// Diagram CSV: columns `param, branch, state_1..state_n, stability,
// bifurcation_kind` (kind empty except on merged bifurcation rows). All
// numeric fields use 17 significant digits, '.' decimals, LF endings, so a
// parse round-trip is bit-exact. Files are written atomically.
void emit_diagram(const BranchDiagram& d, ModelId model, const std::filesystem::path& path);

// Trajectory CSV: columns `t, state_1..state_n`. A downsample stride > 1
// keeps every stride-th sample plus the first and last.
void emit_trajectory(const Trajectory& t, const std::filesystem::path& path,
                     int downsample_stride = 1);

struct ParsedDiagram {
  std::vector<double> param;
  std::vector<std::string> branch;
  std::vector<State> state;
  std::vector<std::string> stability;
  std::vector<std::string> bifurcation_kind;
};
ParsedDiagram parse_diagram(const std::filesystem::path& path);

struct ParsedTrajectory {
  std::vector<double> t;
  std::vector<State> state;
};
ParsedTrajectory parse_trajectory(const std::filesystem::path& path);

std::string_view branch_tag_name(BranchTag t);
std::string_view stability_name(StabilityClass c);
std::string_view bif_kind_name(BifKind k);

// Writes via a temporary in the same directory, then renames into place.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace bifurc
