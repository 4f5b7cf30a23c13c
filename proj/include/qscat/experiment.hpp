#pragma once

#include <string>
#include <vector>

#include "qscat/validate.hpp"

namespace qscat {

// Batch experiment runner.  Configs are JSON (see configs/ for worked
// examples); kinds: cross-section, convergence-D, limiting-amplitude,
// flux-check, oracle-compare, hypothesis-check.
struct ExperimentReport {
  std::string kind;
  bool passed = false;
  std::vector<ValidationCheck> checks;
  std::vector<std::string> artifacts;  // paths relative to outdir
  std::vector<std::string> warnings;
};

// Parses + validates, runs the experiment, writes artifacts and
// report.json under outdir.  Throws config_error / numeric_error;
// on numeric failure a FAILED marker naming the stage is left behind.
ExperimentReport run_experiment(const std::string& config_json,
                                const std::string& outdir, int workers = 1);

// Schema/range validation only (throws config_error on any problem).
void validate_config_text(const std::string& config_json);

// Human-readable catalog + experiment-kind listing; unknown filter ->
// config_error.
std::string describe(const std::string& filter = "");

}  // namespace qscat
