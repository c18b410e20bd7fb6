#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pfflow/config.hpp"
#include "pfflow/oracle.hpp"

namespace pfflow {

struct SnapshotRecord {
  int step = 0;
  double time = 0.0;
  std::optional<Eigen::MatrixXd> samples;  // sample-based experiments
  std::optional<GridDensity> density;      // fd-oracle
};

struct RunArtifacts {
  ExperimentConfig config;
  std::filesystem::path outdir;
  std::vector<SnapshotRecord> snapshots;
  std::vector<std::string> summary_lines;  // key = value, fixed order
  std::vector<std::filesystem::path> files;
  bool ok = true;
  std::string error;
};

// Executes one experiment, writing trajectory.csv, per-snapshot sample /
// histogram (or density) files and summary.txt into outdir. Failures inside
// the run still write the partial trajectory and a summary carrying the
// error cause; `ok` reports whether every requested artifact was written.
RunArtifacts run_experiment(const ExperimentConfig& config,
                            const std::filesystem::path& outdir);

struct ComparisonRow {
  double time = 0.0;
  double w1 = 0.0;
  double mean_abs_diff = 0.0;
  double variance_abs_diff = 0.0;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
  double max_w1 = 0.0;
  double terminal_w1 = 0.0;
};

// Runs both configs under outdir/run_a and outdir/run_b, aligns their
// snapshot time grids (mismatch is an error) and writes comparison.csv plus
// compare_summary.txt with time-matched W1 and moment differences.
ComparisonReport compare_runs(const ExperimentConfig& a, const ExperimentConfig& b,
                              const std::filesystem::path& outdir);

}  // namespace pfflow
