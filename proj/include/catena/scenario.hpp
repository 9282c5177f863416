#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "catena/common.hpp"

namespace catena {

struct RunOptions {
  std::optional<std::uint64_t> seed_override;
  std::string out_dir = ".";
  double tolerance_scale = 1.0;
};

struct CheckResult {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string witness;
};

struct ScenarioOutcome {
  int exit_code = 0;  // 0 pass, 1 verdict fail
  std::string name;
  std::vector<CheckResult> checks;
  std::string report_path;
  std::vector<std::string> csv_paths;
};

/// Runs a scenario configuration: builds the system, the block and the
/// requested construction, executes its verification checks and writes the
/// report JSON (plus any requested CSV traces). Deterministic for a fixed
/// seed. Throws ConfigError on malformed configurations.
ScenarioOutcome run_scenario(const std::string& config_path,
                             const RunOptions& opts = {});

/// Writes the orbit trace CSV of a scenario (columns t, coordinates, L,
/// Ldot, Lddot, residual, event) and returns the outcome of the write.
ScenarioOutcome orbit_export(const std::string& config_path,
                             const RunOptions& opts = {});

/// Runs every scenario listed in a suite file, printing one summary line per
/// scenario; the aggregate exit code is the maximum of the individual codes.
int verify_suite(const std::string& suite_path, const RunOptions& opts,
                 std::ostream& out);

}  // namespace catena
