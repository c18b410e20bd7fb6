#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pfflow/basis.hpp"
#include "pfflow/dual_entropy.hpp"
#include "pfflow/free_energy.hpp"
#include "pfflow/metric.hpp"
#include "pfflow/potential.hpp"
#include "pfflow/sampling.hpp"

namespace pfflow {

enum class ResampleMode { frozen, per_step };

std::string to_string(ResampleMode mode);
ResampleMode resample_mode_from_string(const std::string& name);

struct FlowConfig {
  double dt = 1e-3;
  int steps = 0;
  int sample_count = 10000;
  double ridge = -1.0;  // < 0: scaled default 1e-8 tr(G)/m
  ResampleMode resample = ResampleMode::frozen;
  int snapshot_stride = 100;
  std::uint64_t seed = 0;
  // dual solve configuration; grid defaults to basis support padded by 4
  int dual_knots = 201;
  double dual_padding = 4.0;
  DualAscentParams dual_ascent;
};

enum class FlowStatus { complete, singular_metric, dual_solve_failed };

// Node-indexed record of the Euler iteration; all vectors have steps+1
// entries unless the run aborted, in which case the trajectory is truncated
// at the failing node and `status` says why.
struct FlowTrajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> thetas;
  std::vector<double> free_energies;
  std::vector<double> free_energy_std_errors;
  std::vector<double> metric_condition_numbers;
  std::vector<double> ridge_used;
  int tail_warning_nodes = 0;  // nodes where dual-grid mass leakage exceeded 1e-3
  FlowStatus status = FlowStatus::complete;
  std::string error;
};

// Called at snapshot nodes with the current pushforward ensemble.
using SnapshotSink =
    std::function<void(int step, double t, const ParticleEnsemble& pushed)>;

// One forward-Euler step theta' = theta - dt * (G + eps I)^{-1} grad F.
Eigen::VectorXd euler_step(const Eigen::VectorXd& theta, const BasisSet& basis,
                           const ParticleEnsemble& ensemble, const Potential& V,
                           const FlowConfig& config);

// Integrates the parametric gradient flow, recording theta, F, cond(G) and
// the ridge at every node, and emitting pushforward snapshots at step 0,
// every snapshot_stride steps and the terminal step.
FlowTrajectory run_flow(const Eigen::VectorXd& theta0, const BasisSet& basis,
                        const Potential& V, const FlowConfig& config,
                        const SnapshotSink& snapshot = nullptr);

struct MonotonicityReport {
  int ascent_events = 0;
  std::vector<int> event_nodes;  // node k where F[k+1] > F[k] + slack
};

// Lyapunov check: F should not increase beyond 3 MC standard errors.
MonotonicityReport monotonicity_report(const FlowTrajectory& traj);

}  // namespace pfflow
