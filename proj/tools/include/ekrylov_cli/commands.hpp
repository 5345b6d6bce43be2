#pragma once

#include <exception>
#include <iosfwd>
#include <string>
#include <vector>

#include "ekrylov_cli/config.hpp"

namespace ekrylov::cli {

enum ExitCode : int { kSuccess = 0, kValidationError = 2, kToleranceFailure = 3 };

/// 3 for NumericalFailure, 2 for every other library or parse error.
int exit_code_for(const std::exception& e);

/// Ensemble-only or cavity-coupled coefficients with M sites by the named
/// route ("auto" picks closed-form, then stieltjes for discrete input, then hankel).
ChainCoefficients build_coefficients(const RunConfig& config, const SpectralDistribution& dist,
                                     const std::string& route);

int cmd_coefficients(const RunConfig& config, bool cross_check, std::ostream& out);
int cmd_evolve(const RunConfig& config, std::ostream& out);
int cmd_correlator(const RunConfig& config, std::ostream& out);
int cmd_qsl(const RunConfig& config, std::ostream& out);
int cmd_oracle_compare(const RunConfig& config, std::ostream& out);

/// `key=start:stop:step` (inclusive stop) or `key=v1,v2,...`.
struct SweepSpec {
  std::string key;
  std::vector<double> values;
};
SweepSpec parse_sweep(const std::string& text);

/// Runs `command` (coefficients | evolve | correlator | qsl) once per sweep
/// value on `workers` threads, each into <out>/<name>=<value>/.
int cmd_sweep(const RunConfig& config, const SweepSpec& sweep, const std::string& command, int workers,
              std::ostream& out);

}  // namespace ekrylov::cli
