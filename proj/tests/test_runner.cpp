#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "thinc/errors.hpp"
#include "thinc/runner.hpp"

using namespace thinc;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("JSON config uses the flag names") {
  const RunConfig c = config_from_json(R"({"case": "zalesak", "n": 50, "vtk-every": 3, "max-dt": 0.01, "study": [50, 100]})");
  CHECK(c.case_name == "zalesak");
  CHECK(c.n == 50);
  CHECK(c.vtk_every == 3);
  CHECK(c.max_dt == 0.01);
  CHECK(c.study == std::vector<int>{50, 100});
  CHECK(c.mesh == "cartesian");
  CHECK_THROWS_AS(config_from_json(R"({"resolution": 3})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"n": "many"})"), ConfigError);
  CHECK_THROWS_AS(config_from_json("[1, 2]"), ConfigError);
  CHECK_THROWS_AS(config_from_json("{"), ParseError);
}

TEST_CASE("validation rejects bad settings") {
  RunConfig c;
  CHECK_NOTHROW(validate(c));
  c.gp = 7;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = {};
  c.case_name = "dambreak";
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = {};
  c.mesh = "hexes";
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = {};
  c.periods = 0.0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = {};
  c.case_name = "deform3d";
  c.mesh = "tri-internal";
  CHECK_THROWS_AS(make_mesh(c), ConfigError);
  c = {};
  c.mesh = "msh:/nonexistent/m.msh";
  CHECK_THROWS_AS(make_mesh(c), IoError);
  CHECK_THROWS_AS(convergence_study(RunConfig{}, {32}), ConfigError);
}

TEST_CASE("zero steps reproduce the initial field") {
  for (const char* mesh : {"cartesian", "tri-internal"}) {
    RunConfig c;
    c.mesh = mesh;
    c.steps = 0;
    c.write_files = false;
    const RunResult r = run(c);
    CHECK(r.report.steps == 0);
    CHECK(r.report.e_r < 1e-4);
    CHECK(r.report.vof_drift == 0.0);
  }
}

TEST_CASE("runs are deterministic and write their artifacts") {
  const auto dir = std::filesystem::temp_directory_path() / "thinc_runner_test";
  std::filesystem::remove_all(dir);
  RunConfig c;
  c.n = 16;
  c.steps = 4;
  c.vtk_every = 2;
  c.out = (dir / "a").string();
  const RunResult a = run(c);
  c.out = (dir / "b").string();
  const RunResult b = run(c);
  CHECK(a.state.vof == b.state.vof);
  CHECK(a.state.phi == b.state.phi);
  for (const char* name : {"history_vortex2d_cartesian_N16.csv", "report_vortex2d_cartesian_N16.csv",
                           "vortex2d_cartesian_N16_final.vtk", "vortex2d_cartesian_N16_final_psi.vtk",
                           "vortex2d_cartesian_N16_2.vtk", "vortex2d_cartesian_N16_4_psi.vtk"}) {
    CHECK_MESSAGE(std::filesystem::exists(dir / "a" / name), name);
    CHECK(slurp(dir / "a" / name) == slurp(dir / "b" / name));
  }
  const std::string history = slurp(dir / "a" / "history_vortex2d_cartesian_N16.csv");
  CHECK(std::count(history.begin(), history.end(), '\n') == 5);
}

TEST_CASE("convergence study writes one row per resolution") {
  const auto dir = std::filesystem::temp_directory_path() / "thinc_study_test";
  std::filesystem::remove_all(dir);
  RunConfig c;
  c.steps = 1;
  c.out = dir.string();
  const auto reports = convergence_study(c, {8, 16});
  CHECK(reports.size() == 2);
  const std::string csv = slurp(dir / "study.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}
