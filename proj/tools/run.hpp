#pragma once

#include <filesystem>
#include <ostream>
#include <vector>

#include "config.hpp"

namespace dicke::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfig = 2, kConvergence = 3, kTruncation = 4 };

struct RunReport {
  std::vector<std::filesystem::path> files;
  bool converged = true;  // false when --convergence-check failed
};

// Dispatches on config.mode and writes results under config.output_dir.
// Progress goes to `log`.
RunReport run(const RunConfig& config, std::ostream& log);

// Maps an in-flight exception to an exit code, printing it to `err`.
int exit_code_for_current_exception(std::ostream& err);

}  // namespace dicke::cli
