#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pfflow/config.hpp"
#include "pfflow/errors.hpp"
#include "pfflow/experiment.hpp"
#include "pfflow/io.hpp"
#include "pfflow/oracle.hpp"

using namespace pfflow;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "pfflow_tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig tiny_flow_config() {
  ExperimentConfig c = default_config();
  c.experiment = ExperimentKind::parametric_flow;
  c.basis_m = 5;
  c.basis_l = 3.0;
  c.n = 500;
  c.dt = 1e-2;
  c.horizon = 0.2;
  c.snapshot_stride = 10;
  c.seed = 9;
  return c;
}

}  // namespace

TEST_CASE("config text round trips through the serializer") {
  const ExperimentConfig c = default_config();
  const std::string text = serialize_config(c);
  const ExperimentConfig back = parse_config_text(text);
  CHECK(serialize_config(back) == text);
}

TEST_CASE("config parser rejects malformed input") {
  CHECK_THROWS_AS(parse_config_text("bogus.key = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("n = 100\nn = 200\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("n\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("n = ten\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("potential.sigma = 1,0;0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("dt = 0.3\nT = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("n = -5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("beta = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("experiment = warp\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("basis.m = 3\ntheta0 = 1,2\n"), ConfigError);
}

TEST_CASE("config parser accepts comments, blanks and spacing") {
  const ExperimentConfig c = parse_config_text(
      "# comment\n"
      "\n"
      "  n   =  123  \n"
      "seed=42\n");
  CHECK(c.n == 123);
  CHECK(c.seed == 42);
}

TEST_CASE("initial theta defaults to the identity map") {
  ExperimentConfig c = default_config();
  c.basis_kind = BasisKind::sinusoidal;
  c.basis_m = 5;
  const Eigen::VectorXd t = c.initial_theta();
  CHECK(t[1] == 1.0);
  CHECK(t.cwiseAbs().sum() == 1.0);

  c.basis_kind = BasisKind::hat;
  c.basis_l = 2.0;
  const Eigen::VectorXd th = c.initial_theta();
  const BasisSet hats = c.make_basis();
  for (double x : {-2.0, -0.7, 0.0, 1.3, 2.0})
    CHECK(PushforwardMap1D(hats, th).value(x) == doctest::Approx(x).epsilon(1e-12));
}

TEST_CASE("run_experiment writes the parametric-flow artifact set") {
  const auto dir = fresh_dir("flow_run");
  const auto art = run_experiment(tiny_flow_config(), dir);
  REQUIRE(art.ok);
  CHECK(fs::exists(dir / "trajectory.csv"));
  CHECK(fs::exists(dir / "samples_000000.csv"));
  CHECK(fs::exists(dir / "samples_000010.csv"));
  CHECK(fs::exists(dir / "samples_000020.csv"));
  CHECK(fs::exists(dir / "hist_000020.csv"));
  CHECK(fs::exists(dir / "summary.txt"));

  const std::string traj = slurp(dir / "trajectory.csv");
  CHECK(traj.substr(0, traj.find('\n')) ==
        "t,theta_1,theta_2,theta_3,theta_4,theta_5,F,cond_G,ridge");
  // one header plus steps + 1 node rows
  CHECK(std::count(traj.begin(), traj.end(), '\n') == 22);

  const std::string summary = slurp(dir / "summary.txt");
  CHECK(summary.find("run.status = ok") != std::string::npos);
  CHECK(summary.find("terminal.w1_gibbs = ") != std::string::npos);
  CHECK(summary.find("config.seed = 9") != std::string::npos);
  CHECK(summary.find("config.output.dir") == std::string::npos);
}

TEST_CASE("histogram heights integrate to one") {
  const auto dir = fresh_dir("hist_run");
  const auto art = run_experiment(tiny_flow_config(), dir);
  REQUIRE(art.ok);
  const std::string hist = slurp(dir / "hist_000000.csv");
  std::stringstream ss(hist);
  std::string line;
  std::getline(ss, line);
  CHECK(line == "bin_left,bin_right,count,normalized_height");
  double total = 0.0;
  while (std::getline(ss, line)) {
    double left, right, height;
    long count;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%ld,%lf", &left, &right, &count, &height) == 4);
    total += (right - left) * height;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("steps = 0 emits exactly one snapshot") {
  ExperimentConfig c = tiny_flow_config();
  c.horizon = 0.0;
  const auto dir = fresh_dir("zero_steps");
  const auto art = run_experiment(c, dir);
  REQUIRE(art.ok);
  CHECK(art.snapshots.size() == 1);
  CHECK(fs::exists(dir / "samples_000000.csv"));
  CHECK_FALSE(fs::exists(dir / "samples_000010.csv"));
}

TEST_CASE("identical seeds give bitwise-identical artifacts") {
  const auto dir_a = fresh_dir("det_a");
  const auto dir_b = fresh_dir("det_b");
  run_experiment(tiny_flow_config(), dir_a);
  run_experiment(tiny_flow_config(), dir_b);
  CHECK(slurp(dir_a / "trajectory.csv") == slurp(dir_b / "trajectory.csv"));
  CHECK(slurp(dir_a / "summary.txt") == slurp(dir_b / "summary.txt"));
  CHECK(slurp(dir_a / "samples_000020.csv") == slurp(dir_b / "samples_000020.csv"));

  ExperimentConfig other = tiny_flow_config();
  other.seed = 10;
  const auto dir_c = fresh_dir("det_c");
  run_experiment(other, dir_c);
  CHECK(slurp(dir_a / "trajectory.csv") != slurp(dir_c / "trajectory.csv"));
}

TEST_CASE("the summary's config echo reproduces the run bitwise") {
  const auto dir_a = fresh_dir("roundtrip_a");
  run_experiment(tiny_flow_config(), dir_a);

  // extract the echoed config from the summary and re-run it
  std::string extracted;
  std::stringstream ss(slurp(dir_a / "summary.txt"));
  std::string line;
  while (std::getline(ss, line))
    if (line.rfind("config.", 0) == 0) extracted += line.substr(7) + "\n";
  const ExperimentConfig back = parse_config_text(extracted);

  const auto dir_b = fresh_dir("roundtrip_b");
  run_experiment(back, dir_b);
  CHECK(slurp(dir_a / "trajectory.csv") == slurp(dir_b / "trajectory.csv"));
  CHECK(slurp(dir_a / "summary.txt") == slurp(dir_b / "summary.txt"));
}

TEST_CASE("affine-exact summary reports the closed-form terminal variance") {
  ExperimentConfig c = default_config();
  c.experiment = ExperimentKind::affine_exact;
  c.potential_kind = "quadratic";
  c.beta = 1.0;
  c.sigma0 = Eigen::MatrixXd::Constant(1, 1, 4.0);
  c.mu0 = Eigen::VectorXd::Constant(1, 1.0);
  c.n = 400;
  c.dt = 1e-3;
  c.horizon = 1.0;
  c.snapshot_stride = 500;
  const auto dir = fresh_dir("affine");
  const auto art = run_experiment(c, dir);
  REQUIRE(art.ok);
  const std::string summary = slurp(dir / "summary.txt");
  const auto pos = summary.find("terminal.variance = ");
  REQUIRE(pos != std::string::npos);
  const double var = std::strtod(summary.c_str() + pos + 20, nullptr);
  CHECK(var == doctest::Approx(1.0 + 3.0 * std::exp(-2.0)).epsilon(1e-6));
}

TEST_CASE("fd-oracle writes density snapshots that stay normalized") {
  ExperimentConfig c = default_config();
  c.experiment = ExperimentKind::fd_oracle;
  c.horizon = 0.2;
  c.dt = 1e-2;
  c.snapshot_stride = 10;
  c.grid_nodes = 301;
  c.sigma0 = Eigen::MatrixXd::Identity(1, 1);
  const auto dir = fresh_dir("fd");
  const auto art = run_experiment(c, dir);
  REQUIRE(art.ok);
  CHECK(fs::exists(dir / "density_000000.csv"));
  CHECK(fs::exists(dir / "density_000020.csv"));
  REQUIRE(art.snapshots.size() == 3);
  for (const auto& snap : art.snapshots) {
    REQUIRE(snap.density.has_value());
    CHECK(snap.density->mass() == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("the sde-oracle runner matches sde_simulate at the terminal time") {
  ExperimentConfig c = default_config();
  c.experiment = ExperimentKind::sde_oracle;
  c.horizon = 0.5;
  c.dt = 1e-2;
  c.snapshot_stride = 25;
  c.n = 200;
  c.seed = 31;
  c.sigma0 = Eigen::MatrixXd::Constant(1, 1, 2.25);
  c.mu0 = Eigen::VectorXd::Constant(1, 0.5);
  const auto dir = fresh_dir("sde");
  const auto art = run_experiment(c, dir);
  REQUIRE(art.ok);

  const Potential V = c.make_potential();
  const auto direct = sde_simulate(
      c.n, V, [](NormalStream& s) { return 0.5 + 1.5 * s.next(); }, c.dt, c.horizon,
      c.seed);
  REQUIRE(art.snapshots.back().samples.has_value());
  CHECK(*art.snapshots.back().samples == direct.points);
}

TEST_CASE("compare of a run against itself is all zeros") {
  const auto dir = fresh_dir("cmp_self");
  const auto report = compare_runs(tiny_flow_config(), tiny_flow_config(), dir);
  REQUIRE(report.rows.size() == 3);
  for (const auto& row : report.rows) {
    CHECK(row.w1 == 0.0);
    CHECK(row.mean_abs_diff == 0.0);
    CHECK(row.variance_abs_diff == 0.0);
  }
  CHECK(fs::exists(dir / "comparison.csv"));
  CHECK(fs::exists(dir / "compare_summary.txt"));
}

TEST_CASE("compare rejects mismatched time grids") {
  ExperimentConfig a = tiny_flow_config();
  ExperimentConfig b = tiny_flow_config();
  b.horizon = 0.1;
  const auto dir = fresh_dir("cmp_bad");
  CHECK_THROWS_AS(compare_runs(a, b, dir), Error);
}

TEST_CASE("parametric flow compared with the fd oracle on the OU potential") {
  ExperimentConfig flow = default_config();
  flow.experiment = ExperimentKind::parametric_flow;
  flow.potential_kind = "quadratic";
  flow.beta = 1.0;
  flow.basis_m = 2;
  flow.basis_l = 3.0;
  std::vector<double> th0 = {1.0, 2.0};
  flow.theta0 = th0;
  flow.n = 4000;
  flow.dt = 1e-3;
  flow.horizon = 0.5;
  flow.snapshot_stride = 250;
  flow.grid_lo = -9;
  flow.grid_hi = 9;
  flow.grid_nodes = 901;

  ExperimentConfig fd = flow;
  fd.experiment = ExperimentKind::fd_oracle;
  fd.sigma0 = Eigen::MatrixXd::Constant(1, 1, 4.0);
  fd.mu0 = Eigen::VectorXd::Constant(1, 1.0);

  const auto dir = fresh_dir("cmp_fd");
  const auto report = compare_runs(flow, fd, dir);
  CHECK(report.max_w1 <= 0.08);
}

TEST_CASE("atomic_write leaves no temp file behind") {
  const auto dir = fresh_dir("atomic");
  atomic_write(dir / "x.txt", "payload");
  CHECK(slurp(dir / "x.txt") == "payload");
  CHECK_FALSE(fs::exists(dir / "x.txt.tmp"));
}
