#pragma once

// Command-line front end: `run`, `replicate`, `sweep`, `plotdata`.
//
// Exit codes: 0 ok, 1 config or usage error, 2 I/O error,
// 3 replication outside the calibration bands.

#include "sdsim/config.hpp"
#include "sdsim/sim_engine.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sdsim::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kIoError = 2, kBandsViolated = 3 };

inline constexpr const char* kConfigEnvVar = "SD_SIM_CONFIG";

struct GlobalOptions {
  std::optional<std::filesystem::path> config;
  std::uint64_t seed = 1;
  int jobs = 1;
  std::optional<std::filesystem::path> out;
};

/// --config, then $SD_SIM_CONFIG, then `fallback`.
Config resolve_config(const GlobalOptions& g, const Config& fallback);

int cmd_run(const GlobalOptions& g, Condition condition, int n, const std::optional<std::filesystem::path>& events_path,
            std::ostream& out, std::ostream& err);
int cmd_replicate(const GlobalOptions& g, std::ostream& out, std::ostream& err);
int cmd_sweep(const GlobalOptions& g, const std::string& param_key, const std::vector<double>& values, int n,
              std::ostream& out, std::ostream& err);
int cmd_plotdata(const std::filesystem::path& log_path, const std::optional<std::filesystem::path>& out_path,
                 std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to a subcommand.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sdsim::cli
