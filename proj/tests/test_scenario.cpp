#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "catena/scenario.hpp"

using namespace catena;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string scenario_path(const std::string& name) {
  return std::string(CATENA_SCENARIO_DIR) + "/" + name;
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  return json::parse(in);
}

std::string write_temp(const std::string& name, const std::string& body) {
  const fs::path dir = fs::path("scenario_tmp");
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream out(p);
  out << body;
  return p.string();
}

}  // namespace

TEST_CASE("run_scenario passes on the bundled sum scenario") {
  RunOptions opts;
  opts.out_dir = "scenario_out_a";
  const ScenarioOutcome o = run_scenario(scenario_path("saddle_sum.json"), opts);
  CHECK(o.exit_code == 0);
  REQUIRE(!o.checks.empty());
  for (const auto& c : o.checks) CHECK(c.pass);

  const json report = load_json(o.report_path);
  CHECK(report.at("verdict") == "pass");
  CHECK(report.at("schema_version") == 1);
  CHECK(report.contains("wall_time_ms"));
  // defaults materialized into the config echo
  CHECK(report.at("config").at("block").at("t_max") == 50.0);
}

TEST_CASE("report JSON is deterministic apart from the wall time") {
  RunOptions a, b;
  a.out_dir = "scenario_out_det1";
  b.out_dir = "scenario_out_det2";
  const auto o1 = run_scenario(scenario_path("saddle_sum.json"), a);
  const auto o2 = run_scenario(scenario_path("saddle_sum.json"), b);
  json r1 = load_json(o1.report_path);
  json r2 = load_json(o2.report_path);
  CHECK(r1 != r2);  // wall time differs
  r1.erase("wall_time_ms");
  r2.erase("wall_time_ms");
  CHECK(r1.dump() == r2.dump());
}

TEST_CASE("corrupted field scenarios fail with a witness") {
  RunOptions opts;
  opts.out_dir = "scenario_out_bad";
  const ScenarioOutcome o =
      run_scenario(scenario_path("corrupted_sum.json"), opts);
  CHECK(o.exit_code == 1);
  bool witnessed = false;
  for (const auto& c : o.checks)
    if (!c.pass && !c.witness.empty()) witnessed = true;
  CHECK(witnessed);
}

TEST_CASE("config errors name the offending field") {
  const std::string p = write_temp("missing_level.json", R"({
    "schema_version": 1,
    "name": "bad",
    "system": {"kind": "closed_form", "name": "saddle"},
    "block": {"indicator": {"name": "l1_norm"}},
    "construction": "sum",
    "sum": {"alpha": {"name": "abs_coord", "index": 0},
            "omega": {"name": "abs_coord", "index": 1}},
    "verification": {"grid": {"min": [-1,-1], "max": [1,1], "n": [5,5]}}
  })");
  try {
    run_scenario(p, {});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "block.level");
  }

  const std::string q = write_temp("bad_version.json",
                                   R"({"schema_version": 9, "name": "x"})");
  CHECK_THROWS_AS(run_scenario(q, {}), ConfigError);

  CHECK_THROWS_AS(run_scenario("does_not_exist.json", {}), ConfigError);
}

TEST_CASE("orbit export writes the catenary columns") {
  RunOptions opts;
  opts.out_dir = "scenario_out_trace";
  const ScenarioOutcome o =
      orbit_export(scenario_path("saddle_trace.json"), opts);
  REQUIRE(o.csv_paths.size() == 1);

  std::ifstream in(o.csv_paths[0]);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,c0,c1,L,Ldot,Lddot,residual,event");

  // L(phi_t(1,1)) = e^t + e^{-t} = 2 cosh t along the whole trace
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    REQUIRE(cells.size() >= 7);
    const double t = std::stod(cells[0]);
    const double L = std::stod(cells[3]);
    CHECK(std::abs(L - 2.0 * std::cosh(t)) <= 1e-8);
    const double residual = std::stod(cells[6]);
    CHECK(std::abs(residual) <= 1e-6);
    ++rows;
  }
  CHECK(rows == 201);
}

TEST_CASE("grid CSV export carries the verification columns") {
  RunOptions opts;
  opts.out_dir = "scenario_out_grid";
  const ScenarioOutcome o = run_scenario(scenario_path("saddle_sum.json"), opts);
  CHECK(o.exit_code == 0);
  REQUIRE(!o.csv_paths.empty());
  std::ifstream in(o.csv_paths.front());
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "c0,c1,L,Ldot,Lddot,residual");
  std::string first;
  std::getline(in, first);
  CHECK(!first.empty());
}

TEST_CASE("suspension trace parses the {offset, support} serialization") {
  RunOptions opts;
  opts.out_dir = "scenario_out_sus_trace";
  const ScenarioOutcome o =
      orbit_export(scenario_path("suspension_trace.json"), opts);
  REQUIRE(o.csv_paths.size() == 1);
  std::ifstream in(o.csv_paths[0]);
  REQUIRE(in.good());
  std::string header, row0;
  std::getline(in, header);
  CHECK(header == "t,c0,fiber,L,Ldot,Lddot,residual,event");
  std::getline(in, row0);
  // pair {3,-2} vs {3,-4}: distance lambda^-2 + lambda^-4 at t = 0
  const double lambda = (3.0 + std::sqrt(5.0)) / 2.0;
  const double want = std::pow(lambda, -2.0) + std::pow(lambda, -4.0);
  std::stringstream ss(row0);
  std::string cell;
  std::vector<std::string> cells;
  bool quoted = false;
  std::string cur;
  for (char c : row0) {
    if (c == '"') quoted = !quoted;
    else if (c == ',' && !quoted) { cells.push_back(cur); cur.clear(); }
    else cur += c;
  }
  cells.push_back(cur);
  REQUIRE(cells.size() >= 4);
  CHECK(std::stod(cells[3]) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("stable-set traces decay exponentially") {
  const std::string p = write_temp("ws_trace.json", R"({
    "schema_version": 1,
    "name": "ws_trace",
    "system": {"kind": "closed_form", "name": "saddle"},
    "block": {"indicator": {"name": "l1_norm"}, "level": 1.0, "t_max": 50.0,
              "lambda_distance": {"name": "l1_norm"}},
    "construction": "bvp",
    "bvp": {"a": 1.0, "boundary": {"name": "constant", "value": 1.0}},
    "trace": {"start": [0.0, 0.5], "t0": 0.0, "t1": 0.5, "step": 0.1},
    "output": {"trace_csv": "ws_trace.csv"}
  })");
  RunOptions opts;
  opts.out_dir = "scenario_out_ws";
  const ScenarioOutcome o = orbit_export(p, opts);
  REQUIRE(o.csv_paths.size() == 1);
  std::ifstream in(o.csv_paths[0]);
  std::string header, line;
  std::getline(in, header);
  std::vector<std::pair<double, double>> rows;  // (t, L)
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    REQUIRE(cells.size() >= 4);
    rows.push_back({std::stod(cells[0]), std::stod(cells[3])});
  }
  REQUIRE(rows.size() >= 4);
  // L along the stable axis is 0.5 e^{-t}
  for (const auto& [t, L] : rows)
    CHECK(L == doctest::Approx(0.5 * std::exp(-t)).epsilon(1e-6));
}

TEST_CASE("seed overrides are echoed into the report") {
  RunOptions opts;
  opts.out_dir = "scenario_out_seed";
  opts.seed_override = 99;
  const ScenarioOutcome o =
      run_scenario(scenario_path("shift_catenary.json"), opts);
  CHECK(o.exit_code == 0);
  const json report = load_json(o.report_path);
  CHECK(report.at("seed") == 99);
  CHECK(report.at("config").at("seed") == 99);
}

TEST_CASE("verify_suite aggregates exit codes") {
  std::ostringstream log;

  SUBCASE("empty suite warns and returns zero") {
    CHECK(verify_suite(scenario_path("empty_suite.json"), {}, log) == 0);
    CHECK(log.str().find("warning") != std::string::npos);
  }

  SUBCASE("a suite with a failing scenario returns one") {
    // paths resolve relative to the suite file, so point at it absolutely
    const std::string q = write_temp(
        "failing_suite_abs.json",
        std::string(R"({"scenarios": [")") + CATENA_SCENARIO_DIR +
            R"(/corrupted_sum.json"]})");
    RunOptions opts;
    opts.out_dir = "scenario_out_suitefail";
    CHECK(verify_suite(q, opts, log) == 1);
  }

  SUBCASE("missing scenario files are a config error") {
    const std::string p = write_temp(
        "missing_suite.json", R"({"scenarios": ["no_such_scenario.json"]})");
    CHECK_THROWS_AS(verify_suite(p, {}, log), ConfigError);
  }
}
