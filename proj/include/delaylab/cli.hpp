#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "delaylab/experiment.hpp"

namespace delaylab {

enum ExitCode : int {
  kExitOk = 0,
  kExitInvariantFailure = 1,
  kExitConfigError = 2,
  kExitIoError = 3,
};

// Writes trace.csv (run 0), aggregate.csv and summary.json into
// config.out_dir, then prints the summary line:
//   mean_final_regret=<x> stderr=<x> mean_g_star=<x> runs=<r> horizon=<n>
int cmd_run(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

// Exit 0 iff every invariant holds; otherwise names the first failure.
int cmd_validate(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

// Closed-form bound table (CSV) without simulating.
int cmd_bounds(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

std::string summary_line(const AggregateStats& stats);

void write_aggregate_csv(std::ostream& out, const AggregateStats& stats, const std::vector<BoundCurve>& bounds);
std::string summary_json(const ExperimentConfig& config, const AggregateStats& stats,
                         const std::vector<BoundCurve>& bounds);

// Writes via a temporary sibling and renames on success.
void write_file_atomically(const std::filesystem::path& path, const std::string& contents);

// Entry point of the delaylab executable.
int run_cli(int argc, char** argv);

}  // namespace delaylab
