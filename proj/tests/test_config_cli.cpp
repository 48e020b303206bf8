#include "sck/cli.hpp"
#include "sck/config.hpp"
#include "sck/errors.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

using namespace sck;
namespace fs = std::filesystem;

namespace {

const char* kSingle = R"({
  "task": "solve",
  "seed": 3,
  "out": "unused",
  "problem": {
    "kind": "single", "rho": 1.0, "sigma_tilde": 1.0, "k_plus": 0.5, "k_minus": 0.5,
    "cost": {"type": "quadratic", "curvature": 1.0}
  },
  "solver": {"grid": 101, "levels": 3},
  "sim": {"dt": 0.01, "horizon": 4.0, "paths": 64, "record_paths": 2, "record_stride": 50}
})";

const char* kTwoPlayer = R"({
  "problem": {
    "kind": "two_player", "rho": 1.0,
    "sigma": [[0.7071067811865476, 0.0], [0.0, 0.7071067811865476]],
    "k_plus": [1.0, 1.0], "k_minus": [1.0, 1.0],
    "costs": [{"curvature": 1.0}, {"curvature": 1.0}]
  }
})";

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("sck_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("config round trip") {
  for (const char* text : {kSingle, kTwoPlayer}) {
    auto c = parse_config_text(text);
    auto j = to_json(c);
    CHECK(parse_config(j) == c);
    CHECK(to_json(parse_config(j)) == j);
  }
}

TEST_CASE("shipped configs parse and round trip") {
  for (const auto& e : fs::directory_iterator(fs::path(SCK_SOURCE_DIR) / "configs")) {
    CAPTURE(e.path().string());
    auto c = load_config(e.path().string());
    CHECK(parse_config(to_json(c)) == c);
  }
}

TEST_CASE("schema errors are config errors") {
  auto j = nlohmann::json::parse(kSingle);
  auto missing = j;
  missing["problem"].erase("rho");
  CHECK_THROWS_AS(parse_config(missing), ConfigError);
  auto unknown = j;
  unknown["problem"]["rhoo"] = 1.0;
  CHECK_THROWS_AS(parse_config(unknown), ConfigError);
  auto wrong_type = j;
  wrong_type["seed"] = "three";
  CHECK_THROWS_AS(parse_config(wrong_type), ConfigError);
  auto tp = nlohmann::json::parse(kTwoPlayer);
  tp["problem"]["k_plus"] = {1.0};
  CHECK_THROWS_AS(parse_config(tp), ConfigError);
  CHECK_THROWS_AS(parse_config_text("{not json"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/sck.json"), ConfigError);
  CHECK(problem_kind(parse_config_text(kTwoPlayer).problem) == "two_player");
}

TEST_CASE("bad problem data maps to the config exit code") {
  auto c = parse_config_text(kSingle);
  c.out = scratch("bad").string();
  std::get<SingleConfig>(c.problem).rho = -1.0;
  std::ostringstream log;
  CHECK(run_command("solve", c, log) == kExitConfig);
  auto ok = parse_config_text(kSingle);
  ok.out = scratch("unknown").string();
  CHECK(run_command("frobnicate", ok, log) == kExitConfig);
}

TEST_CASE("solve writes the report set") {
  auto c = parse_config_text(kSingle);
  c.out = scratch("solve").string();
  std::ostringstream log;
  CHECK(run_command("solve", c, log) == kExitOk);
  for (const char* f : {"thresholds.csv", "value_grid.csv", "diagnostics.csv", "report.json"}) {
    CHECK(fs::exists(fs::path(c.out) / f));
  }
  auto rep = nlohmann::json::parse(slurp(fs::path(c.out) / "report.json"));
  CHECK(rep["seed"] == 3);
  CHECK(rep["passed"] == true);
  CHECK(parse_config(rep["config"]).problem == c.problem);
  CHECK(slurp(fs::path(c.out) / "value_grid.csv").rfind("x,v,dv,d2v,branch\n", 0) == 0);
}

TEST_CASE("simulate with one path reports the error as not applicable") {
  auto c = parse_config_text(kSingle);
  c.out = scratch("one_path").string();
  c.sim.paths = 1;
  std::ostringstream log;
  CHECK(run_command("simulate", c, log) == kExitOk);
  auto stats = slurp(fs::path(c.out) / "stats.csv");
  CHECK(stats.rfind("stat,value,stderr\n", 0) == 0);
  CHECK(stats.find(",NA\n") != std::string::npos);
}

TEST_CASE("repeated runs are byte identical") {
  auto c = parse_config_text(kTwoPlayer);
  c.sim.dt = 0.01;
  c.sim.horizon = 3.0;
  c.sim.paths = 64;
  c.solver.grid = 101;
  std::ostringstream log;
  c.out = scratch("rep_a").string();
  REQUIRE(run_command("compare", c, log) != kExitSolver);
  const auto a = c.out;
  c.out = scratch("rep_b").string();
  REQUIRE(run_command("compare", c, log) != kExitSolver);
  for (const char* f : {"stats.csv", "paths.csv", "curves.csv", "thresholds.csv"}) {
    CAPTURE(f);
    CHECK(slurp(fs::path(a) / f) == slurp(fs::path(c.out) / f));
  }
}

TEST_CASE("verify writes a convergence table") {
  auto c = parse_config_text(kSingle);
  c.out = scratch("verify").string();
  std::ostringstream log;
  CHECK(run_command("verify", c, log) == kExitOk);
  auto conv = slurp(fs::path(c.out) / "convergence.csv");
  CHECK(std::count(conv.begin(), conv.end(), '\n') == 4);
}

TEST_CASE("sweep covers every K") {
  auto c = parse_config_text(kSingle);
  c.out = scratch("sweep").string();
  c.sweep.k = {0.5, 1.0, 2.0};
  std::ostringstream log;
  CHECK(run_command("sweep", c, log) == kExitOk);
  auto s = slurp(fs::path(c.out) / "sweep.csv");
  CHECK(std::count(s.begin(), s.end(), '\n') == 4);
}
