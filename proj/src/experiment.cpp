#include "pfflow/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "pfflow/errors.hpp"
#include "pfflow/flow.hpp"
#include "pfflow/free_energy.hpp"
#include "pfflow/gaussian_affine.hpp"
#include "pfflow/io.hpp"
#include "pfflow/rng.hpp"

namespace pfflow {

namespace {

namespace fs = std::filesystem;

std::string step_tag(int step) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%06d", step);
  return buf;
}

double sample_mean(const Eigen::MatrixXd& pts) { return pts.col(0).mean(); }

double sample_variance(const Eigen::MatrixXd& pts) {
  const double m = pts.col(0).mean();
  return (pts.col(0).array() - m).square().sum() / pts.rows();
}

// Writer shared by all experiments: accumulates summary lines in a fixed
// order and remembers every artifact written.
struct RunWriter {
  RunArtifacts& art;

  void file(const fs::path& name, const std::string& content) {
    const fs::path path = art.outdir / name;
    atomic_write(path, content);
    art.files.push_back(path);
  }

  void summary(const std::string& key, const std::string& value) {
    art.summary_lines.push_back(key + " = " + value);
  }
  void summary(const std::string& key, double value) { summary(key, format_double(value)); }

  void sample_snapshot(const ExperimentConfig& c, int step, double t,
                       const Eigen::MatrixXd& pts) {
    art.snapshots.push_back({step, t, pts, std::nullopt});
    std::string csv;
    const int d = static_cast<int>(pts.cols());
    for (int j = 0; j < d; ++j) {
      if (j) csv += ',';
      csv += d == 1 ? "y" : "y" + std::to_string(j + 1);
    }
    csv += '\n';
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      for (int j = 0; j < d; ++j) {
        if (j) csv += ',';
        csv += format_double(pts(i, j));
      }
      csv += '\n';
    }
    file("samples_" + step_tag(step) + ".csv", csv);
    if (d == 1) {
      const Histogram h = make_histogram(pts.col(0), c.hist_lo, c.hist_hi, c.hist_bins);
      file("hist_" + step_tag(step) + ".csv", histogram_csv(h));
    }
  }

  void density_snapshot(int step, double t, const GridDensity& rho) {
    art.snapshots.push_back({step, t, std::nullopt, rho});
    std::string csv = "x,density\n";
    for (int i = 0; i < rho.nodes(); ++i) {
      csv += format_double(rho.node(i));
      csv += ',';
      csv += format_double(rho.values[i]);
      csv += '\n';
    }
    file("density_" + step_tag(step) + ".csv", csv);
  }

  void config_echo(const ExperimentConfig& c) {
    std::stringstream ss(serialize_config(c));
    std::string line;
    while (std::getline(ss, line))
      if (!line.empty()) art.summary_lines.push_back("config." + line);
  }

  void finish() {
    std::string text;
    for (const auto& line : art.summary_lines) {
      text += line;
      text += '\n';
    }
    file("summary.txt", text);
  }
};

std::vector<int> snapshot_steps(const ExperimentConfig& c) {
  std::vector<int> steps{0};
  const int total = c.steps();
  for (int k = c.snapshot_stride; k < total; k += c.snapshot_stride) steps.push_back(k);
  if (total > 0) steps.push_back(total);
  return steps;
}

void gibbs_metrics(RunWriter& w, const ExperimentConfig& c, const Potential& V,
                   const Eigen::MatrixXd& terminal_samples) {
  if (!(V.beta() > 0.0) || terminal_samples.cols() != 1) return;
  const GridDensity gibbs = gibbs_density(V, c.grid_lo, c.grid_hi, c.grid_nodes);
  ParticleEnsemble e{terminal_samples, Provenance::pushforward};
  w.summary("terminal.w1_gibbs", wasserstein1(e, gibbs));
}

// Moment reference for quadratic potentials when the initial map is affine:
// theta0 = (b, s, 0, ...) over a {1, x, ...} basis starts at N(b, s^2).
std::optional<std::pair<double, double>> affine_reference_moments(
    const ExperimentConfig& c, const Potential& V, const Eigen::VectorXd& theta0) {
  if (V.kind() != PotentialKind::quadratic || V.dimension() != 1) return std::nullopt;
  if (c.basis_kind == BasisKind::hat || theta0.size() < 2) return std::nullopt;
  if (theta0.size() > 2 && theta0.tail(theta0.size() - 2).cwiseAbs().maxCoeff() != 0.0)
    return std::nullopt;
  if (theta0[1] <= 0.0) return std::nullopt;
  Eigen::MatrixXd sigma0(1, 1);
  sigma0(0, 0) = theta0[1] * theta0[1];
  Eigen::VectorXd mu0(1);
  mu0(0) = theta0[0];
  const auto states = integrate_affine(sigma0, mu0, V, c.dt, c.horizon);
  const auto moments = gaussian_moments(states.back());
  return std::make_pair(moments.mean(0), moments.covariance(0, 0));
}

void run_parametric_flow(RunWriter& w, const ExperimentConfig& c) {
  const Potential V = c.make_potential();
  if (V.dimension() != 1) throw ConfigError("parametric-flow requires a 1D potential");
  const BasisSet basis = c.make_basis();
  const Eigen::VectorXd theta0 = c.initial_theta();
  const FlowConfig flow_config = c.make_flow_config();

  FlowTrajectory traj = run_flow(theta0, basis, V, flow_config,
                                 [&](int step, double t, const ParticleEnsemble& pushed) {
                                   w.sample_snapshot(c, step, t, pushed.points);
                                 });

  std::string csv = "t";
  for (int k = 1; k <= basis.size(); ++k) csv += ",theta_" + std::to_string(k);
  csv += ",F,cond_G,ridge\n";
  for (size_t i = 0; i < traj.times.size(); ++i) {
    csv += format_double(traj.times[i]);
    for (int k = 0; k < basis.size(); ++k) csv += ',' + format_double(traj.thetas[i][k]);
    csv += ',' + format_double(traj.free_energies[i]);
    csv += ',' + format_double(traj.metric_condition_numbers[i]);
    csv += ',' + format_double(traj.ridge_used[i]);
    csv += '\n';
  }
  w.file("trajectory.csv", csv);

  if (traj.status != FlowStatus::complete) {
    w.art.ok = false;
    w.art.error = traj.error.empty() ? "flow aborted" : traj.error;
    w.summary("run.status", std::string("error"));
    w.summary("run.error", w.art.error);
    return;
  }

  w.summary("run.status", std::string("ok"));
  w.summary("run.steps", static_cast<double>(flow_config.steps));
  w.summary("terminal.time", traj.times.back());
  const Eigen::MatrixXd& terminal = *w.art.snapshots.back().samples;
  w.summary("terminal.mean", sample_mean(terminal));
  w.summary("terminal.variance", sample_variance(terminal));
  w.summary("terminal.free_energy", traj.free_energies.back());
  gibbs_metrics(w, c, V, terminal);
  if (const auto ref = affine_reference_moments(c, V, theta0)) {
    w.summary("terminal.mean_error", sample_mean(terminal) - ref->first);
    w.summary("terminal.variance_error", sample_variance(terminal) - ref->second);
  }
  const MonotonicityReport mono = monotonicity_report(traj);
  w.summary("flow.ascent_events", static_cast<double>(mono.ascent_events));
  w.summary("flow.tail_warning_nodes", static_cast<double>(traj.tail_warning_nodes));
}

void run_affine_exact(RunWriter& w, const ExperimentConfig& c) {
  const Potential V = c.make_potential();
  if (V.kind() != PotentialKind::quadratic)
    throw ConfigError("affine-exact requires potential.kind = quadratic");
  const int d = V.dimension();
  if (c.sigma0.rows() != d || c.mu0.size() != d)
    throw ConfigError("affine-exact: init dimensions must match the potential");

  const auto states = integrate_affine(c.sigma0, c.mu0, V, c.dt, c.horizon);

  std::string csv = "t";
  for (int i = 1; i <= d; ++i)
    for (int j = 1; j <= d; ++j)
      csv += ",gamma_" + std::to_string(i) + "_" + std::to_string(j);
  for (int i = 1; i <= d; ++i) csv += ",b_" + std::to_string(i);
  csv += ",F\n";
  for (const auto& s : states) {
    csv += format_double(s.time);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) csv += ',' + format_double(s.gamma(i, j));
    for (int i = 0; i < d; ++i) csv += ',' + format_double(s.shift[i]);
    csv += ',' + format_double(gaussian_free_energy(s, V));
    csv += '\n';
  }
  w.file("trajectory.csv", csv);

  // frozen reference ensemble pushed through the affine state at each node
  const ParticleEnsemble reference = sample_reference({d, c.seed}, c.n, 0);
  for (int step : snapshot_steps(c)) {
    const AffineState& s = states[static_cast<size_t>(step)];
    const AffineMap map{s.gamma, s.shift};
    w.sample_snapshot(c, step, s.time, pushforward_samples(map, reference).points);
  }

  const auto& last = states.back();
  const auto moments = gaussian_moments(last);
  w.summary("run.status", std::string("ok"));
  w.summary("run.steps", static_cast<double>(c.steps()));
  w.summary("terminal.time", last.time);
  if (d == 1) {
    w.summary("terminal.mean", moments.mean(0));
    w.summary("terminal.variance", moments.covariance(0, 0));
  } else {
    std::string mean_s, cov_s;
    for (int i = 0; i < d; ++i) {
      if (i) mean_s += ',';
      mean_s += format_double(moments.mean(i));
    }
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        if (i || j) cov_s += ',';
        cov_s += format_double(moments.covariance(i, j));
      }
    w.summary("terminal.mean", mean_s);
    w.summary("terminal.covariance", cov_s);
  }
  w.summary("terminal.free_energy", gaussian_free_energy(last, V));
}

void run_fd_oracle(RunWriter& w, const ExperimentConfig& c) {
  const Potential V = c.make_potential();
  if (V.dimension() != 1) throw ConfigError("fd-oracle requires a 1D potential");
  if (c.sigma0.rows() != 1) throw ConfigError("fd-oracle requires 1D init.sigma0");
  const double s0 = std::sqrt(c.sigma0(0, 0));
  const double m0 = c.mu0(0);

  GridDensity rho = discretize_density(
      [&](double x) {
        const double z = (x - m0) / s0;
        return std::exp(-0.5 * z * z);
      },
      c.grid_lo, c.grid_hi, c.grid_nodes);

  double fd_dt = c.fd_dt == "auto" ? 0.9 * fd_stable_dt(rho, V)
                                   : std::strtod(c.fd_dt.c_str(), nullptr);

  std::string csv = "t,mean,variance,mass\n";
  const auto record = [&](double t) {
    csv += format_double(t);
    csv += ',' + format_double(rho.mean());
    csv += ',' + format_double(rho.variance());
    csv += ',' + format_double(rho.mass());
    csv += '\n';
  };

  const auto steps = snapshot_steps(c);
  double t = 0.0;
  record(0.0);
  w.density_snapshot(0, 0.0, rho);
  for (size_t i = 1; i < steps.size(); ++i) {
    const double target = steps[i] * c.dt;
    rho = fd_solve(rho, V, fd_dt, target - t);
    t = target;
    record(t);
    w.density_snapshot(steps[i], t, rho);
  }
  w.file("trajectory.csv", csv);

  w.summary("run.status", std::string("ok"));
  w.summary("run.steps", static_cast<double>(c.steps()));
  w.summary("terminal.time", t);
  w.summary("terminal.mean", rho.mean());
  w.summary("terminal.variance", rho.variance());
  w.summary("terminal.mass_error", std::abs(rho.mass() - 1.0));
  if (V.beta() > 0.0) {
    const GridDensity gibbs = gibbs_density(V, c.grid_lo, c.grid_hi, c.grid_nodes);
    w.summary("terminal.w1_gibbs", wasserstein1(rho, gibbs));
  }
}

void run_sde_oracle(RunWriter& w, const ExperimentConfig& c) {
  const Potential V = c.make_potential();
  if (V.dimension() != 1) throw ConfigError("sde-oracle requires a 1D potential");
  if (c.sigma0.rows() != 1) throw ConfigError("sde-oracle requires 1D init.sigma0");
  const double s0 = std::sqrt(c.sigma0(0, 0));
  const double m0 = c.mu0(0);

  const auto snaps = snapshot_steps(c);
  const int total = c.steps();
  const double noise = std::sqrt(2.0 * V.beta() * c.dt);

  // particle-major sweep recording at snapshot steps; per-particle streams
  // keep the terminal states identical to a straight sde_simulate call
  std::vector<Eigen::MatrixXd> buffers(snaps.size(), Eigen::MatrixXd(c.n, 1));
  for (int i = 0; i < c.n; ++i) {
    NormalStream stream(c.seed, "sde", static_cast<std::uint64_t>(i));
    double x = m0 + s0 * stream.next();
    size_t next_snap = 0;
    if (snaps[0] == 0) buffers[0](i, 0) = x;
    if (snaps[0] == 0) next_snap = 1;
    for (int k = 1; k <= total; ++k) {
      x += -V.gradient1d(x) * c.dt + noise * stream.next();
      if (next_snap < snaps.size() && snaps[next_snap] == k) {
        buffers[next_snap](i, 0) = x;
        ++next_snap;
      }
    }
  }

  std::string csv = "t,mean,variance\n";
  for (size_t j = 0; j < snaps.size(); ++j) {
    const double t = snaps[j] * c.dt;
    w.sample_snapshot(c, snaps[j], t, buffers[j]);
    csv += format_double(t);
    csv += ',' + format_double(sample_mean(buffers[j]));
    csv += ',' + format_double(sample_variance(buffers[j]));
    csv += '\n';
  }
  w.file("trajectory.csv", csv);

  const Eigen::MatrixXd& terminal = buffers.back();
  w.summary("run.status", std::string("ok"));
  w.summary("run.steps", static_cast<double>(total));
  w.summary("terminal.time", total * c.dt);
  w.summary("terminal.mean", sample_mean(terminal));
  w.summary("terminal.variance", sample_variance(terminal));
  gibbs_metrics(w, c, V, terminal);
}

}  // namespace

RunArtifacts run_experiment(const ExperimentConfig& config, const fs::path& outdir) {
  RunArtifacts art;
  art.config = config;
  art.outdir = outdir;
  fs::create_directories(outdir);
  RunWriter w{art};

  try {
    switch (config.experiment) {
      case ExperimentKind::parametric_flow: run_parametric_flow(w, config); break;
      case ExperimentKind::affine_exact: run_affine_exact(w, config); break;
      case ExperimentKind::fd_oracle: run_fd_oracle(w, config); break;
      case ExperimentKind::sde_oracle: run_sde_oracle(w, config); break;
    }
  } catch (const std::exception& e) {
    art.ok = false;
    art.error = e.what();
    w.summary("run.status", std::string("error"));
    w.summary("run.error", art.error);
  }

  w.summary("artifacts.count", static_cast<double>(art.files.size() + 1));
  w.config_echo(config);
  w.finish();
  return art;
}

namespace {

std::pair<double, double> snapshot_moments(const SnapshotRecord& s) {
  if (s.samples) return {sample_mean(*s.samples), sample_variance(*s.samples)};
  return {s.density->mean(), s.density->variance()};
}

double snapshot_w1(const SnapshotRecord& a, const SnapshotRecord& b) {
  if (a.samples && b.samples)
    return wasserstein1(ParticleEnsemble{*a.samples, Provenance::pushforward},
                        ParticleEnsemble{*b.samples, Provenance::pushforward});
  if (a.samples && b.density)
    return wasserstein1(ParticleEnsemble{*a.samples, Provenance::pushforward}, *b.density);
  if (a.density && b.samples)
    return wasserstein1(ParticleEnsemble{*b.samples, Provenance::pushforward}, *a.density);
  return wasserstein1(*a.density, *b.density);
}

}  // namespace

ComparisonReport compare_runs(const ExperimentConfig& a, const ExperimentConfig& b,
                              const fs::path& outdir) {
  const RunArtifacts ra = run_experiment(a, outdir / "run_a");
  if (!ra.ok) throw Error("compare: run_a failed: " + ra.error);
  const RunArtifacts rb = run_experiment(b, outdir / "run_b");
  if (!rb.ok) throw Error("compare: run_b failed: " + rb.error);

  if (ra.snapshots.size() != rb.snapshots.size())
    throw Error("compare: snapshot time grids differ in length");
  ComparisonReport report;
  for (size_t i = 0; i < ra.snapshots.size(); ++i) {
    const auto& sa = ra.snapshots[i];
    const auto& sb = rb.snapshots[i];
    if (std::abs(sa.time - sb.time) > 1e-9 * std::max(1.0, std::abs(sa.time)))
      throw Error("compare: mismatched snapshot times");
    ComparisonRow row;
    row.time = sa.time;
    row.w1 = snapshot_w1(sa, sb);
    const auto [ma, va] = snapshot_moments(sa);
    const auto [mb, vb] = snapshot_moments(sb);
    row.mean_abs_diff = std::abs(ma - mb);
    row.variance_abs_diff = std::abs(va - vb);
    report.rows.push_back(row);
    report.max_w1 = std::max(report.max_w1, row.w1);
  }
  report.terminal_w1 = report.rows.empty() ? 0.0 : report.rows.back().w1;

  std::string csv = "t,w1,mean_abs_diff,variance_abs_diff\n";
  for (const auto& row : report.rows) {
    csv += format_double(row.time);
    csv += ',' + format_double(row.w1);
    csv += ',' + format_double(row.mean_abs_diff);
    csv += ',' + format_double(row.variance_abs_diff);
    csv += '\n';
  }
  atomic_write(outdir / "comparison.csv", csv);

  std::string summary;
  summary += "compare.snapshots = " + std::to_string(report.rows.size()) + "\n";
  summary += "compare.max_w1 = " + format_double(report.max_w1) + "\n";
  summary += "compare.terminal_w1 = " + format_double(report.terminal_w1) + "\n";
  atomic_write(outdir / "compare_summary.txt", summary);
  return report;
}

}  // namespace pfflow
