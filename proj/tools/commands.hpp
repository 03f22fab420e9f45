#pragma once

#include <string>

namespace mgcc::cli {

enum ExitCode : int {
  kOk = 0,
  kDomainError = 1,
  kConfigError = 2,
  kNonConvergence = 3,
};

int section_analyze(const std::string& config_path);
int tandem_solve(const std::string& config_path);
int tandem_sweep(const std::string& config_path);
int oracle_compare(const std::string& config_path);

/// Runs a command, mapping library exceptions onto exit codes and printing
/// the message to stderr.
int guarded(int (*command)(const std::string&), const std::string& config_path);

}  // namespace mgcc::cli
