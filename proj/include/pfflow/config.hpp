#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pfflow/basis.hpp"
#include "pfflow/flow.hpp"

namespace pfflow {

enum class ExperimentKind { parametric_flow, affine_exact, fd_oracle, sde_oracle };

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

// Flat key = value experiment description. The file format is line-oriented:
// `key = value`, `#` comments, blank lines ignored; list values are
// comma-separated, matrices use `;` between rows. Unknown keys are rejected.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::parametric_flow;

  // potential + diffusion
  std::string potential_kind = "polynomial";  // quadratic | polynomial
  Eigen::MatrixXd potential_sigma = Eigen::MatrixXd::Identity(1, 1);
  Eigen::VectorXd potential_mu = Eigen::VectorXd::Zero(1);
  std::vector<double> potential_coeffs = {1.0, 0.0, -2.0, 0.0, 1.0};
  double beta = 0.25;

  // pushforward basis (parametric-flow)
  BasisKind basis_kind = BasisKind::sinusoidal;
  int basis_m = 31;
  double basis_l = 4.0;
  std::vector<double> theta0;  // empty: identity-map coefficients

  // affine-exact initial data
  Eigen::MatrixXd sigma0 = 4.0 * Eigen::MatrixXd::Identity(1, 1);
  Eigen::VectorXd mu0 = Eigen::VectorXd::Zero(1);

  // discretization
  int n = 10000;
  double dt = 1e-3;
  double horizon = 5.0;
  std::uint64_t seed = 0;

  // flow controls
  std::string flow_ridge = "auto";  // auto | number >= 0
  ResampleMode flow_resample = ResampleMode::frozen;
  int snapshot_stride = 100;

  // dual entropy solve
  int dual_knots = 201;
  double dual_padding = 4.0;
  double dual_tol = 1e-6;
  int dual_max_iters = 5000;

  // oracle grid (fd-oracle, gibbs reference metrics)
  double grid_lo = -3.0;
  double grid_hi = 3.0;
  int grid_nodes = 2001;
  std::string fd_dt = "auto";  // auto: 0.9 x stability bound

  // histograms
  int hist_bins = 80;
  double hist_lo = -3.0;
  double hist_hi = 3.0;

  // optional; overridden by OUTPUT_DIR, then --out; excluded from the
  // summary's resolved-config echo
  std::string output_dir;

  int steps() const;
  double ridge_value() const;  // -1 for auto
  Potential make_potential() const;
  BasisSet make_basis() const;
  Eigen::VectorXd initial_theta() const;  // theta0 or identity coefficients
  FlowConfig make_flow_config() const;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Canonical form: every semantic key in fixed order, floats at 17
// significant digits. output.dir is omitted.
std::string serialize_config(const ExperimentConfig& config);

ExperimentConfig default_config();

}  // namespace pfflow
