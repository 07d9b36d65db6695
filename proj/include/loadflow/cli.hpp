#pragma once

#include <optional>
#include <ostream>
#include <string>

namespace loadflow::cli {

enum ExitCode : int {
  kExitPass = 0,
  kExitConditionFailed = 1,
  kExitInputError = 2,
  kExitNotConverged = 3,
};

struct RunConfig {
  std::string subcommand;  // check | solve | sweep | dump-matrix
  std::string network_path;
  std::string injection_path;
  std::optional<std::string> operating_point_path;
  double tol = 1e-9;
  int max_iter = 200;
  std::optional<double> kappa_max;  // MVA; defaults to twice the ray's own total
  int steps = 512;
  std::string output_path;
  std::optional<std::string> summary_path;            // sweep: boundaries as JSON
  std::optional<std::string> operating_point_output;  // solve: write (v, s)
};

// Each returns the process exit code. Diagnostics go to `err`; all
// machine data goes to files.
int run_check(const RunConfig& config, std::ostream& err);
int run_solve(const RunConfig& config, std::ostream& err);
int run_sweep(const RunConfig& config, std::ostream& err);
int run_dump_matrix(const RunConfig& config, std::ostream& err);

int run(const RunConfig& config, std::ostream& err);

/// Parses argv and dispatches.
int main_entry(int argc, char** argv);

}  // namespace loadflow::cli
