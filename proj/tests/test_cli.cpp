// End-to-end checks of the command line tool: exit codes and emitted files.
// The binary path comes from the BIFURC_BIN environment variable (set by the
// test harness).

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"
#include "bifurc/report.hpp"

namespace fs = std::filesystem;

namespace {

std::string bin() {
  const char* b = std::getenv("BIFURC_BIN");
  REQUIRE_MESSAGE(b != nullptr, "BIFURC_BIN not set");
  return b;
}

struct Result {
  int code;
  std::string out;
};

Result run(const std::string& args) {
  std::string cmd = bin() + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[512];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}

fs::path write_file(const char* name, const std::string& text) {
  fs::path f = fs::temp_directory_path() / name;
  std::ofstream(f) << text;
  return f;
}

const char* kInhostCase2 = R"({
  "model": "INHOST_CONVEX",
  "params": {"A": 0.71, "B": 0.0572, "C": 0.823, "D": 0.057},
  "options": {"ic": [2.4, 0.5], "out": "cli_traj.csv"}
})";

}  // namespace

TEST_CASE("simulate writes a trajectory whose verdict is recurrent") {
  fs::path cfg = write_file("bifurc_cli_sim.json", kInhostCase2);
  fs::path outdir = fs::temp_directory_path();
  Result r = run("simulate --config " + cfg.string() + " --out " + outdir.string());
  CHECK(r.code == 0);
  CHECK(r.out.find("verdict=recurrent") != std::string::npos);
  CHECK(fs::exists(outdir / "cli_traj.csv"));
  fs::remove(outdir / "cli_traj.csv");
  fs::remove(cfg);
}

TEST_CASE("invalid configurations exit with code 2") {
  fs::path bad_key = write_file("bifurc_cli_bad1.json",
                                R"({"model": "INHOST_CONVEX",
                                    "params": {"A": 1, "B": 1, "C": 1, "D": 1},
                                    "junk": true})");
  Result r1 = run("hopf --config " + bad_key.string());
  CHECK(r1.code == 2);
  CHECK(r1.out.find("junk") != std::string::npos);

  fs::path bad_param = write_file("bifurc_cli_bad2.json",
                                  R"({"model": "INHOST_CONVEX",
                                      "params": {"A": 1, "B": -0.5, "C": 1, "D": 1}})");
  Result r2 = run("equilibria --config " + bad_param.string());
  CHECK(r2.code == 2);
  CHECK(r2.out.find("B") != std::string::npos);

  Result r3 = run("hopf --config /nonexistent_zzz.json");
  CHECK(r3.code == 2);

  fs::path no_ic = write_file("bifurc_cli_bad3.json",
                              R"({"model": "INHOST_CONVEX",
                                  "params": {"A": 1, "B": 1, "C": 1, "D": 1}})");
  Result r4 = run("simulate --config " + no_ic.string());
  CHECK(r4.code == 2);
  fs::remove(bad_key);
  fs::remove(bad_param);
  fs::remove(no_ic);
}

TEST_CASE("unwritable output exits with code 3") {
  fs::path cfg = write_file("bifurc_cli_sim3.json", kInhostCase2);
  Result r = run("simulate --config " + cfg.string() + " --out /nonexistent_dir_zzz");
  CHECK(r.code == 3);
  fs::remove(cfg);
}

TEST_CASE("reproduce exits 0 on the bundled tables and 4 on a doctored table") {
  fs::path cfg = write_file("bifurc_cli_rep.json", R"({"command": "reproduce"})");
  fs::path outdir = fs::temp_directory_path();
  Result ok = run("reproduce --config " + cfg.string() + " --table T4 --out " +
                  outdir.string());
  CHECK(ok.code == 0);
  CHECK(ok.out.find("80/80") != std::string::npos);
  CHECK(fs::exists(outdir / "reproduce_T4.csv"));

  auto j = nlohmann::json::parse(bifurc::golden_tables_text());
  j["T4"]["rows"][0]["d"] = 5.0;  // wrong sign and magnitude
  fs::path golden = write_file("bifurc_cli_golden.json", j.dump());
  fs::path cfg2 = write_file("bifurc_cli_rep2.json",
                             std::string(R"({"command": "reproduce", "options": {"golden_path": ")") +
                                 golden.string() + R"("}})");
  Result bad = run("reproduce --config " + cfg2.string() + " --table T4 --case 1 --out " +
                   outdir.string());
  CHECK(bad.code == 4);
  CHECK(bad.out.find("FAIL") != std::string::npos);
  fs::remove(outdir / "reproduce_T4.csv");
  fs::remove(cfg);
  fs::remove(cfg2);
  fs::remove(golden);
}

TEST_CASE("classify reports shape, geometry, and bistability") {
  fs::path cfg = write_file("bifurc_cli_cls.json", R"({
    "model": "INHOST_CONVEX",
    "params": {"A": 0.8, "B": 0.036, "C": 0.823, "D": 0.057},
    "options": {"ics": [[17.5, 0.001], [2.233, 0.873]]}
  })");
  Result r = run("classify --config " + cfg.string());
  CHECK(r.code == 0);
  CHECK(r.out.find("backward_positive") != std::string::npos);
  CHECK(r.out.find("bistable") != std::string::npos);
  fs::remove(cfg);
}

TEST_CASE("diagram emits both files") {
  fs::path cfg = write_file("bifurc_cli_diag.json", R"({
    "model": "INHOST_CONVEX",
    "params": {"A": 0.07, "B": 0.06, "C": 0.823, "D": 0.057},
    "options": {"param_range": [0.058, 0.11], "samples": 21}
  })");
  fs::path outdir = fs::temp_directory_path() / "bifurc_cli_diag_out";
  fs::create_directories(outdir);
  Result r = run("diagram --config " + cfg.string() + " --out " + outdir.string());
  CHECK(r.code == 0);
  CHECK(fs::exists(outdir / "diagram.csv"));
  CHECK(fs::exists(outdir / "bifurcations.csv"));
  fs::remove_all(outdir);
  fs::remove(cfg);
}
