#pragma once

// Command implementations behind the `qrelay` executable. Each command takes
// a canonical JSON configuration, so a run manifest can replay it exactly.

#include <string>

#include <json.hpp>

#include "qrelay/lemma_checks.hpp"
#include "qrelay/optimizer.hpp"
#include "qrelay/simulation.hpp"

namespace qrelay::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitCap = 2, kExitParse = 3 };

int exit_code_for(ErrorKind kind);

struct CommandResult {
  int exit_code = kExitOk;
  nlohmann::json report;  // machine-readable output
  std::string text;       // human-readable output
};

/// Keys: "channel" (path).
CommandResult cmd_validate(const nlohmann::json& config);
/// Keys: channel, u_size, restarts, max_iters, seed, grid (0 = multistart), threads.
CommandResult cmd_rate(const nlohmann::json& config);
/// Keys: channel, n, blocks, rm, rl (both null = use fraction), fraction,
/// delta, trials, seed, mode ("exact" | "hn"), window ("genie" | "chained"),
/// dim_cap, dist ("optimized" | "uniform"), u_size, restarts, threads.
CommandResult cmd_simulate(const nlohmann::json& config);
/// Keys: dim_min, dim_max, instances, seed, and the unlisted hn_confusion.
CommandResult cmd_check(const nlohmann::json& config);
/// Keys: "dir". Writes every shipped example channel as <dir>/<name>.json.
CommandResult cmd_export_examples(const nlohmann::json& config);

/// Dispatches on the command name.
CommandResult run_command(const std::string& command, const nlohmann::json& config);

/// Canonical report bytes: two-space indented JSON plus a newline.
std::string report_text(const nlohmann::json& report);
std::string sha256_hex(const std::string& data);

/// command, config, seed, tool_version, wall_clock_seconds, output_digest.
nlohmann::json make_manifest(const std::string& command, const nlohmann::json& config, const CommandResult& result,
                             double wall_clock_seconds);

/// Re-runs a manifest; the report records both digests and whether they match.
CommandResult cmd_replay(const nlohmann::json& manifest);

nlohmann::json to_json(const InputDistribution& dist);
nlohmann::json to_json(const RateReport& report);
nlohmann::json to_json(const SimulationReport& report);
nlohmann::json to_json(const std::vector<SuiteResult>& suites);

}  // namespace qrelay::cli
