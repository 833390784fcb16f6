#pragma once

#include <iosfwd>
#include <string>

#include "dam/cli/config.hpp"
#include "dam/cli/validation.hpp"

namespace dam::cli {

enum ExitCode : int { kOk = 0, kValidationFailed = 1, kConfigError = 2 };

// Each command writes into cfg.output_dir and a short summary to `log`.
int cmd_evaluate(const RunConfig& cfg, std::ostream& log);
int cmd_simulate(const RunConfig& cfg, unsigned threads, std::ostream& log);
int cmd_validate(const RunConfig& cfg, const ValidationOptions& opt, std::ostream& log);
int cmd_optimize(const RunConfig& cfg, unsigned threads, std::ostream& log);
int cmd_stationary(const RunConfig& cfg, unsigned threads, std::ostream& log);

/// damctl entry point.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dam::cli
