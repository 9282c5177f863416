#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "catena/common.hpp"
#include "catena/scenario.hpp"

namespace {

void add_shared(CLI::App* cmd, catena::RunOptions& opts,
                std::uint64_t& seed, bool& seed_set) {
  cmd->add_option_function<std::uint64_t>(
         "--seed", [&](std::uint64_t v) { seed = v; seed_set = true; },
         "override the scenario RNG seed");
  cmd->add_option("--out-dir", opts.out_dir, "directory for reports and CSVs");
  cmd->add_option("--tolerance-scale", opts.tolerance_scale,
                  "multiply every tolerance by this factor");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "catena: catenary Lyapunov functions, pseudo-metrics and sectional "
      "metrics around isolated sets"};
  app.require_subcommand(1);

  std::string run_path, trace_path, suite_path;
  catena::RunOptions opts;
  std::uint64_t seed = 0;
  bool seed_set = false;

  CLI::App* run = app.add_subcommand("run", "run a scenario and write its report");
  run->add_option("scenario", run_path, "scenario JSON file")->required();
  add_shared(run, opts, seed, seed_set);

  CLI::App* trace = app.add_subcommand("trace", "export an orbit trace CSV");
  trace->add_option("scenario", trace_path, "scenario JSON file")->required();
  add_shared(trace, opts, seed, seed_set);

  CLI::App* suite = app.add_subcommand("suite", "run every scenario in a suite");
  suite->add_option("suite", suite_path, "suite JSON file")->required();
  add_shared(suite, opts, seed, seed_set);

  CLI11_PARSE(app, argc, argv);
  if (seed_set) opts.seed_override = seed;

  try {
    if (run->parsed()) {
      const catena::ScenarioOutcome o = catena::run_scenario(run_path, opts);
      for (const auto& c : o.checks)
        std::cout << (c.pass ? "pass" : "FAIL") << "  " << c.name << " = "
                  << c.value << " (tolerance " << c.tolerance << ")\n";
      std::cout << "report: " << o.report_path << "\n";
      return o.exit_code;
    }
    if (trace->parsed()) {
      const catena::ScenarioOutcome o = catena::orbit_export(trace_path, opts);
      for (const auto& p : o.csv_paths) std::cout << "trace: " << p << "\n";
      return o.exit_code;
    }
    return catena::verify_suite(suite_path, opts, std::cout);
  } catch (const catena::ConfigError& e) {
    std::cerr << "config error [" << e.field() << "]: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
