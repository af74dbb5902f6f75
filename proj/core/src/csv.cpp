#include "bifurc/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "bifurc/errors.hpp"

namespace bifurc {

namespace {

constexpr std::string_view kBranchNames[] = {"uninfected", "infected_lower",
                                             "infected_upper", "double_root"};
constexpr std::string_view kStabilityNames[] = {"stable_node",   "stable_focus",
                                                "saddle",        "unstable_node",
                                                "unstable_focus", "nonhyperbolic"};
constexpr std::string_view kKindNames[] = {"transcritical", "turning", "hopf",
                                           "neutral_saddle"};

std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc())
    throw NumericalError("malformed numeric CSV field '" + std::string(s) + "'");
  return v;
}

}  // namespace

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path dir = path.parent_path();
  fs::path tmp = (dir.empty() ? fs::path(".") : dir) /
                 (path.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw NumericalError("cannot open '" + tmp.string() + "' for writing");
    out << content;
    if (!out.flush())
      throw NumericalError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw NumericalError("cannot move output into place at '" + path.string() + "'");
  }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::string_view branch_tag_name(BranchTag t) { return kBranchNames[static_cast<int>(t)]; }
std::string_view stability_name(StabilityClass c) {
  return kStabilityNames[static_cast<int>(c)];
}
std::string_view bif_kind_name(BifKind k) { return kKindNames[static_cast<int>(k)]; }

void emit_diagram(const BranchDiagram& d, ModelId model, const std::filesystem::path& path) {
  if (d.samples.empty()) throw ContractViolation("refusing to emit an empty diagram");
  int n = dimension(model);
  std::ostringstream os;
  os << "param,branch";
  for (int i = 1; i <= n; ++i) os << ",state_" << i;
  os << ",stability,bifurcation_kind\n";
  for (const BranchSample& s : d.samples) {
    os << format_double(s.param) << ',' << branch_tag_name(s.point.branch);
    for (int i = 0; i < n; ++i) os << ',' << format_double(s.point.state[i]);
    os << ',' << stability_name(s.stability.cls) << ',';
    if (s.bifurcation) os << bif_kind_name(*s.bifurcation);
    os << '\n';
  }
  write_text_atomic(path, os.str());
}

void emit_trajectory(const Trajectory& t, const std::filesystem::path& path,
                     int downsample_stride) {
  if (downsample_stride < 1) throw std::invalid_argument("stride must be >= 1");
  std::ostringstream os;
  os << "t";
  for (int i = 1; i <= t.dim(); ++i) os << ",state_" << i;
  os << '\n';
  auto emit_row = [&](std::size_t i) {
    os << format_double(t.time(i));
    for (int k = 0; k < t.dim(); ++k) os << ',' << format_double(t.component(i, k));
    os << '\n';
  };
  std::size_t last = 0;
  for (std::size_t i = 0; i < t.size(); i += downsample_stride) {
    emit_row(i);
    last = i;
  }
  if (t.size() > 0 && last != t.size() - 1) emit_row(t.size() - 1);
  write_text_atomic(path, os.str());
}

ParsedDiagram parse_diagram(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NumericalError("cannot open '" + path.string() + "'");
  ParsedDiagram d;
  std::string line;
  if (!std::getline(in, line)) throw NumericalError("empty diagram file");
  auto header = split_csv_line(line);
  int n = static_cast<int>(header.size()) - 4;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    d.param.push_back(parse_double(f[0]));
    d.branch.push_back(f[1]);
    State s = State::zeros(n);
    for (int i = 0; i < n; ++i) s[i] = parse_double(f[2 + i]);
    d.state.push_back(s);
    d.stability.push_back(f[2 + n]);
    d.bifurcation_kind.push_back(f[3 + n]);
  }
  return d;
}

ParsedTrajectory parse_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NumericalError("cannot open '" + path.string() + "'");
  ParsedTrajectory t;
  std::string line;
  if (!std::getline(in, line)) throw NumericalError("empty trajectory file");
  int n = static_cast<int>(split_csv_line(line).size()) - 1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    t.t.push_back(parse_double(f[0]));
    State s = State::zeros(n);
    for (int i = 0; i < n; ++i) s[i] = parse_double(f[1 + i]);
    t.state.push_back(s);
  }
  return t;
}

}  // namespace bifurc
