#pragma once

#include "spatial_ak/config.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace spatial_ak {

enum ExitCode : int {
    kExitOk = 0,
    kExitInternal = 1,
    kExitInfeasible = 2,
    kExitAuditFailed = 3,
};

struct CommandOptions {
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> n_points;
    bool quiet = false;
    // Multiplies alpha after solving. Only for checking that verify fails.
    double debug_alpha_scale = 1.0;
};

/// Applies command-line overrides to a parsed run file and validates it.
RunConfig resolve_config(RunConfig config, const CommandOptions& options);

// Each command writes its outputs under the resolved output directory,
// reports progress on `log` unless quiet, and errors on `err`. The config
// is validated before anything is computed or written.
int cmd_solve(const RunConfig& config, const CommandOptions& options, std::ostream& log, std::ostream& err);
int cmd_simulate(const RunConfig& config, const CommandOptions& options, std::ostream& log, std::ostream& err);
int cmd_verify(const RunConfig& config, const CommandOptions& options, std::ostream& log, std::ostream& err);
int cmd_sweep(const RunConfig& config, const CommandOptions& options, std::ostream& log, std::ostream& err);
int cmd_perron_audit(const RunConfig& config, const CommandOptions& options, std::ostream& log,
                     std::ostream& err);

/// Loads `config_path`, dispatches `command` and maps exceptions to exit codes.
int run_command(const std::string& command, const std::string& config_path, const CommandOptions& options,
                std::ostream& log, std::ostream& err);

}  // namespace spatial_ak
