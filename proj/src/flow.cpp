#include "pfflow/flow.hpp"

#include <cmath>
#include <optional>

#include "pfflow/errors.hpp"

namespace pfflow {

std::string to_string(ResampleMode mode) {
  return mode == ResampleMode::frozen ? "frozen" : "per-step";
}

ResampleMode resample_mode_from_string(const std::string& name) {
  if (name == "frozen") return ResampleMode::frozen;
  if (name == "per-step") return ResampleMode::per_step;
  throw ConfigError("unknown resample mode: " + name);
}

namespace {

struct NodeEval {
  MetricTensor metric;
  Eigen::VectorXd gradient;
  double free_energy = 0.0;
  double std_error = 0.0;
  bool tail_warning = false;
  std::optional<DualPotential> witness;
};

// Metric, free energy and envelope gradient at one theta over one ensemble;
// the dual witness is solved once and shared by the gradient and the F
// record.
NodeEval evaluate_node(const PushforwardMap1D& map, const ParticleEnsemble& ensemble,
                       const Potential& V, const DualGridSpec& grid,
                       const DualAscentParams& ascent, const DualPotential* warm) {
  NodeEval eval;
  eval.metric = metric_1d(map, ensemble);

  const double beta = V.beta();
  const DualPotential* witness = nullptr;
  double entropy = 0.0;
  if (beta != 0.0) {
    DualSolveResult dual = solve_dual_entropy(map, ensemble, grid, ascent, warm);
    entropy = dual.entropy;
    eval.tail_warning = dual.tail_warning;
    eval.witness = std::move(dual.witness);
    witness = &*eval.witness;
  }

  const int n = ensemble.count();
  const int m = map.basis.size();
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd phi(m);
  double pot = 0.0, vh = 0.0, vh2 = 0.0;
  for (int s = 0; s < n; ++s) {
    const double x = ensemble.points(s, 0);
    const double y = map.value(x);
    const double v = V.value1d(y);
    double pull = V.gradient1d(y);
    double sample_vh = v;
    if (witness != nullptr) {
      pull += beta * witness->derivative(y);
      sample_vh += beta * witness->value(y);
    }
    map.basis.values(x, std::span<double>(phi.data(), static_cast<size_t>(m)));
    acc += pull * phi;
    pot += v;
    vh += sample_vh;
    vh2 += sample_vh * sample_vh;
  }
  eval.gradient = acc / n;
  eval.free_energy = pot / n + beta * entropy;
  const double mean_vh = vh / n;
  eval.std_error = std::sqrt(std::max(0.0, vh2 / n - mean_vh * mean_vh) / n);
  return eval;
}

}  // namespace

Eigen::VectorXd euler_step(const Eigen::VectorXd& theta, const BasisSet& basis,
                           const ParticleEnsemble& ensemble, const Potential& V,
                           const FlowConfig& config) {
  const PushforwardMap1D map(basis, theta);
  const DualGridSpec grid = DualGridSpec::for_basis(basis, config.dual_padding,
                                                    config.dual_knots);
  NodeEval eval = evaluate_node(map, ensemble, V, grid, config.dual_ascent, nullptr);
  const double ridge = config.ridge >= 0.0 ? config.ridge : default_ridge(eval.metric);
  const RegularizedSolve solve = solve_regularized(eval.metric, eval.gradient, ridge);
  return theta - config.dt * solve.solution;
}

FlowTrajectory run_flow(const Eigen::VectorXd& theta0, const BasisSet& basis,
                        const Potential& V, const FlowConfig& config,
                        const SnapshotSink& snapshot) {
  if (!(config.dt > 0.0)) throw Error("run_flow: dt must be positive");
  if (config.steps < 0) throw Error("run_flow: steps must be >= 0");
  if (config.sample_count <= 0) throw Error("run_flow: sample_count must be positive");
  if (config.snapshot_stride <= 0) throw Error("run_flow: snapshot_stride must be positive");

  const ReferenceMeasure p{1, config.seed};
  const DualGridSpec grid = DualGridSpec::for_basis(basis, config.dual_padding,
                                                    config.dual_knots);

  FlowTrajectory traj;
  traj.times.reserve(config.steps + 1);

  ParticleEnsemble ensemble = sample_reference(p, config.sample_count, 0);
  Eigen::VectorXd theta = theta0;
  std::optional<DualPotential> warm;

  const auto emit_snapshot = [&](int step) {
    if (snapshot == nullptr) return;
    const bool due = step == 0 || step == config.steps || step % config.snapshot_stride == 0;
    if (!due) return;
    const PushforwardMap1D map(basis, theta);
    snapshot(step, step * config.dt, pushforward_samples(map, ensemble));
  };

  for (int k = 0; k <= config.steps; ++k) {
    if (config.resample == ResampleMode::per_step && k > 0)
      ensemble = sample_reference(p, config.sample_count, static_cast<std::uint64_t>(k));

    const PushforwardMap1D map(basis, theta);
    NodeEval eval;
    try {
      eval = evaluate_node(map, ensemble, V, grid, config.dual_ascent,
                           warm ? &*warm : nullptr);
    } catch (const DualSolveError& e) {
      traj.status = FlowStatus::dual_solve_failed;
      traj.error = e.what();
      return traj;
    }
    warm = eval.witness;
    if (eval.tail_warning) ++traj.tail_warning_nodes;

    const double ridge = config.ridge >= 0.0 ? config.ridge : default_ridge(eval.metric);

    traj.times.push_back(k * config.dt);
    traj.thetas.push_back(theta);
    traj.free_energies.push_back(eval.free_energy);
    traj.free_energy_std_errors.push_back(eval.std_error);
    traj.metric_condition_numbers.push_back(condition_number(eval.metric, ridge));
    emit_snapshot(k);

    if (k == config.steps) {
      // terminal node: record the ridge that a further step would use
      traj.ridge_used.push_back(ridge);
      break;
    }

    RegularizedSolve solve;
    try {
      solve = solve_regularized(eval.metric, eval.gradient, ridge);
    } catch (const SingularMetricError& e) {
      traj.ridge_used.push_back(ridge);
      traj.status = FlowStatus::singular_metric;
      traj.error = e.what();
      return traj;
    }
    traj.ridge_used.push_back(solve.ridge_used);
    theta -= config.dt * solve.solution;
    if (!theta.allFinite()) {
      traj.status = FlowStatus::dual_solve_failed;
      traj.error = "run_flow: theta became non-finite";
      return traj;
    }
  }
  return traj;
}

MonotonicityReport monotonicity_report(const FlowTrajectory& traj) {
  MonotonicityReport report;
  for (size_t k = 0; k + 1 < traj.free_energies.size(); ++k) {
    const double slack =
        3.0 * std::max(traj.free_energy_std_errors[k], traj.free_energy_std_errors[k + 1]);
    if (traj.free_energies[k + 1] > traj.free_energies[k] + slack) {
      ++report.ascent_events;
      report.event_nodes.push_back(static_cast<int>(k));
    }
  }
  return report;
}

}  // namespace pfflow
