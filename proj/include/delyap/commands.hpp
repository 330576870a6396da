#pragma once

// Workflows behind the `delyap` command-line tool. Each returns the process
// exit code and writes its files into config.output_dir.

#include <iosfwd>
#include <string>
#include <vector>

#include "delyap/config.hpp"
#include "delyap/odec.hpp"

namespace delyap::cli {

enum ExitCode : int {
  kSuccess = 0,
  kSpectrumViolation = 1,
  kBorderline = 2,
  kInputError = 3,
  kNumericalFailure = 4,
};

struct CommandOptions {
  bool quiet = false;
};

/// Solve, sample P on the τ grid, write P_tau.csv, report.txt and
/// summary.json.
int cmd_solve(const RunConfig& config, std::ostream& out,
              const CommandOptions& options = {});

/// Spectrum verdict, sigma_min and n_s. Exit 0 / 2 / 1 for satisfied /
/// borderline / violated.
int cmd_check(const RunConfig& config, std::ostream& out,
              const CommandOptions& options = {});

/// Cross-checks the analytic solution against simulation and residuals;
/// writes report.txt, summary.json and trajectory.csv.
int cmd_validate(const RunConfig& config, std::ostream& out,
                 const CommandOptions& options = {});

/// P at the explicit τ list (config tau.values, or the τ grid). Writes
/// P_samples.csv and echoes it.
int cmd_sample(const RunConfig& config, std::ostream& out,
               const CommandOptions& options = {});

/// Writes the table τ, p_11, p_12, ..., p_nn (row-major entries) with 17
/// significant digits.
void write_p_table(std::ostream& os, const LyapunovSolution& sol,
                   const std::vector<double>& taus);

}  // namespace delyap::cli
