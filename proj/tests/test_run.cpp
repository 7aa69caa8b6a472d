#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "inflam/errors.hpp"
#include "inflam/run.hpp"

using namespace inflam;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("inflam_test_run_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) out.push_back(line);
  return out;
}

RunConfig preset_run(int id, Course course, const fs::path& out, double t_end) {
  RunConfig cfg;
  cfg.preset_id = id;
  cfg.course = course;
  cfg.out_dir = out;
  cfg.solver.t_end = t_end;
  cfg.check_points = 128;
  return cfg;
}

}  // namespace

TEST_CASE("model 1 run writes one snapshot per component and time") {
  const auto dir = scratch("snap");
  auto cfg = preset_run(1, Course::Healing, dir, 40.0);
  cfg.snapshot_times = {0.0, 16.0, 40.0};
  std::stringstream log;
  REQUIRE(run(cfg, log) == kExitOk);
  int snaps = 0;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().filename().string().starts_with("snapshot_")) ++snaps;
  CHECK(snaps == 12);
  CHECK(fs::exists(dir / snapshot_filename("Tc", 16.0)));
  CHECK(fs::exists(dir / "requirements.txt"));
  CHECK(fs::exists(dir / "classification.txt"));
  CHECK_FALSE(fs::exists(dir / "sigma.txt"));

  const auto snap = lines(slurp(dir / snapshot_filename("q1", 40.0)));
  REQUIRE(snap.size() == 22);
  CHECK(snap[0] == "# t=40 component=q1 nx=21 ny=21");

  // norms.csv: header plus one row per sample, same column count everywhere.
  const auto csv = lines(slurp(dir / "norms.csv"));
  REQUIRE(csv.size() == 802);
  CHECK(csv[0] == "t,q1_L1,q1_Linf,Th_L1,Th_Linf,Tc_L1,Tc_Linf,q3_L1,q3_Linf");
  for (const auto& row : csv) CHECK(std::count(row.begin(), row.end(), ',') == 8);
  CHECK(csv.back().starts_with("40,"));
}

TEST_CASE("identical configurations give byte-identical norms") {
  const auto a = scratch("rep_a"), b = scratch("rep_b");
  std::stringstream log;
  REQUIRE(run(preset_run(3, Course::Chronic, a, 10.0), log) == kExitOk);
  REQUIRE(run(preset_run(3, Course::Chronic, b, 10.0), log) == kExitOk);
  CHECK(slurp(a / "norms.csv") == slurp(b / "norms.csv"));
  CHECK(slurp(a / "requirements.txt") == slurp(b / "requirements.txt"));
}

TEST_CASE("without killing the virus saturates") {
  const auto dir = scratch("nokill");
  auto cfg = preset_run(2, Course::Healing, dir, 20.0);
  cfg.overrides = {{"a5", 0.0}};
  std::stringstream log;
  REQUIRE(run(cfg, log) == kExitOk);
  const auto csv = lines(slurp(dir / "norms.csv"));
  const auto& last = csv.back();
  // t, q1_L1, q1_Linf, ...
  const auto c1 = last.find(','), c2 = last.find(',', c1 + 1), c3 = last.find(',', c2 + 1);
  CHECK(std::stod(last.substr(c2 + 1, c3 - c2 - 1)) >= 0.9);
}

TEST_CASE("check exit codes") {
  std::stringstream log;
  for (int id : {1, 2, 3}) {
    auto cfg = preset_run(id, Course::Healing, scratch("check"), 1.0);
    CHECK(check(cfg, log) == kExitOk);
  }
  RunConfig none;
  none.out_dir = scratch("none");
  CHECK(check(none, log) == kExitConfigError);
  RunConfig missing;
  missing.model_file = "/nonexistent/file.model";
  missing.out_dir = scratch("missing");
  CHECK(check(missing, log) == kExitConfigError);
}

TEST_CASE("configuration errors exit with 2") {
  std::stringstream log;
  auto cfg = preset_run(3, Course::Healing, scratch("bad"), 1.0);
  cfg.overrides = {{"nosuch", 1.0}};
  CHECK(run(cfg, log) == kExitConfigError);
  cfg.overrides.clear();
  cfg.grid_n = 2;
  CHECK(run(cfg, log) == kExitConfigError);
  cfg.grid_n = 21;
  cfg.snapshot_times = {5.0};
  CHECK(run(cfg, log) == kExitConfigError);
  CHECK(log.str().find("error:") != std::string::npos);
}

TEST_CASE("solver failure exits with 3 and keeps partial output") {
  const auto dir = scratch("fail");
  auto cfg = preset_run(1, Course::Healing, dir, 5.0);
  cfg.solver.mode = SolverMode::AdaptiveExplicit;
  cfg.solver.rel_tol = 1e-13;
  cfg.solver.abs_tol = 1e-15;
  cfg.solver.dt_init = 0.05;
  cfg.solver.dt_min = 0.01;
  std::stringstream log;
  CHECK(run(cfg, log) == kExitSolverFailure);
  CHECK(fs::exists(dir / "norms.csv"));
  CHECK(log.str().find("integration failed") != std::string::npos);
}

TEST_CASE("override and time-list parsing") {
  CHECK(parse_override("a5=0.5") == std::pair<std::string, double>{"a5", 0.5});
  CHECK_THROWS_AS(parse_override("a5"), ConfigError);
  CHECK_THROWS_AS(parse_override("=1"), ConfigError);
  CHECK_THROWS_AS(parse_override("a5=x"), ConfigError);
  CHECK_THROWS_AS(parse_override("a5=1x"), ConfigError);
  CHECK(parse_time_list("0,16,40") == std::vector<double>{0.0, 16.0, 40.0});
  CHECK_THROWS_AS(parse_time_list("0,,1"), ConfigError);
}
