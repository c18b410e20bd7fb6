#include "pfflow/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "pfflow/errors.hpp"
#include "pfflow/io.hpp"
#include "pfflow/potential.hpp"

namespace pfflow {

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::parametric_flow: return "parametric-flow";
    case ExperimentKind::affine_exact: return "affine-exact";
    case ExperimentKind::fd_oracle: return "fd-oracle";
    case ExperimentKind::sde_oracle: return "sde-oracle";
  }
  return "?";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
  if (name == "parametric-flow") return ExperimentKind::parametric_flow;
  if (name == "affine-exact") return ExperimentKind::affine_exact;
  if (name == "fd-oracle") return ExperimentKind::fd_oracle;
  if (name == "sde-oracle") return ExperimentKind::sde_oracle;
  throw ConfigError("unknown experiment: " + name);
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end != value.c_str() + value.size() || value.empty() || errno == ERANGE)
    throw ConfigError(key + ": not a number: '" + value + "'");
  return v;
}

long parse_long(const std::string& key, const std::string& value) {
  errno = 0;
  char* end = nullptr;
  const long v = std::strtol(value.c_str(), &end, 10);
  if (end != value.c_str() + value.size() || value.empty() || errno == ERANGE)
    throw ConfigError(key + ": not an integer: '" + value + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
  if (end != value.c_str() + value.size() || value.empty() || errno == ERANGE ||
      value.find('-') != std::string::npos)
    throw ConfigError(key + ": not an unsigned integer: '" + value + "'");
  return v;
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

Eigen::MatrixXd parse_matrix(const std::string& key, const std::string& value) {
  std::vector<std::vector<double>> rows;
  std::stringstream ss(value);
  std::string row;
  while (std::getline(ss, row, ';')) rows.push_back(parse_list(key, trim(row)));
  if (rows.empty()) throw ConfigError(key + ": empty matrix");
  const size_t cols = rows[0].size();
  for (const auto& r : rows)
    if (r.size() != cols) throw ConfigError(key + ": ragged matrix rows");
  Eigen::MatrixXd m(rows.size(), cols);
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
  return m;
}

std::string list_string(const std::vector<double>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += format_double(v[i]);
  }
  return out;
}

std::string list_string(const Eigen::VectorXd& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += format_double(v[i]);
  }
  return out;
}

std::string matrix_string(const Eigen::MatrixXd& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (i) out += ';';
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += format_double(m(i, j));
    }
  }
  return out;
}

void validate(const ExperimentConfig& c) {
  const auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  require(c.potential_kind == "quadratic" || c.potential_kind == "polynomial",
          "potential.kind must be quadratic or polynomial");
  require(c.beta >= 0.0, "beta must be >= 0");
  require(c.basis_m >= 1, "basis.m must be >= 1");
  require(c.basis_l > 0.0, "basis.l must be > 0");
  require(c.theta0.empty() || static_cast<int>(c.theta0.size()) == c.basis_m,
          "theta0 length must equal basis.m");
  require(c.n >= 1, "n must be >= 1");
  require(c.dt > 0.0, "dt must be > 0");
  require(c.horizon >= 0.0, "T must be >= 0");
  const double steps = c.horizon / c.dt;
  require(std::abs(steps - std::round(steps)) <= 1e-6 * std::max(1.0, steps),
          "T must be an integer multiple of dt");
  require(c.flow_ridge == "auto" || parse_double("flow.ridge", c.flow_ridge) >= 0.0,
          "flow.ridge must be auto or >= 0");
  require(c.snapshot_stride >= 1, "flow.snapshot_stride must be >= 1");
  require(c.dual_knots >= 2, "dual.knots must be >= 2");
  require(c.dual_padding >= 0.0, "dual.padding must be >= 0");
  require(c.dual_tol > 0.0, "dual.tol must be > 0");
  require(c.dual_max_iters >= 1, "dual.max_iters must be >= 1");
  require(c.grid_hi > c.grid_lo, "grid.hi must exceed grid.lo");
  require(c.grid_nodes >= 2, "grid.nodes must be >= 2");
  require(c.fd_dt == "auto" || parse_double("fd.dt", c.fd_dt) > 0.0,
          "fd.dt must be auto or > 0");
  require(c.hist_bins >= 1, "hist.bins must be >= 1");
  require(c.hist_hi > c.hist_lo, "hist.hi must exceed hist.lo");
  require(c.potential_sigma.rows() == c.potential_sigma.cols(),
          "potential.sigma must be square");
  require(c.potential_mu.size() == c.potential_sigma.rows(),
          "potential.mu length must match potential.sigma");
  require(c.sigma0.rows() == c.sigma0.cols(), "init.sigma0 must be square");
  require(c.mu0.size() == c.sigma0.rows(), "init.mu0 length must match init.sigma0");
  require(!c.potential_coeffs.empty(), "potential.coeffs must be non-empty");
}

}  // namespace

int ExperimentConfig::steps() const {
  return static_cast<int>(std::llround(horizon / dt));
}

double ExperimentConfig::ridge_value() const {
  if (flow_ridge == "auto") return -1.0;
  return parse_double("flow.ridge", flow_ridge);
}

Potential ExperimentConfig::make_potential() const {
  if (potential_kind == "quadratic")
    return Potential::quadratic(potential_sigma, potential_mu, beta);
  return Potential::polynomial(potential_coeffs, beta);
}

BasisSet ExperimentConfig::make_basis() const {
  return BasisSet(basis_kind, basis_m, basis_l);
}

Eigen::VectorXd ExperimentConfig::initial_theta() const {
  if (!theta0.empty())
    return Eigen::Map<const Eigen::VectorXd>(theta0.data(), theta0.size());
  // identity-map coefficients
  Eigen::VectorXd t = Eigen::VectorXd::Zero(basis_m);
  if (basis_kind == BasisKind::hat) {
    const double spacing = 2.0 * basis_l / (basis_m - 1);
    for (int k = 0; k < basis_m; ++k) t[k] = -basis_l + k * spacing;
  } else {
    if (basis_m < 2)
      throw ConfigError("theta0 required: identity map needs basis.m >= 2");
    t[1] = 1.0;
  }
  return t;
}

FlowConfig ExperimentConfig::make_flow_config() const {
  FlowConfig f;
  f.dt = dt;
  f.steps = steps();
  f.sample_count = n;
  f.ridge = ridge_value();
  f.resample = flow_resample;
  f.snapshot_stride = snapshot_stride;
  f.seed = seed;
  f.dual_knots = dual_knots;
  f.dual_padding = dual_padding;
  f.dual_ascent = {dual_tol, dual_max_iters};
  return f;
}

ExperimentConfig parse_config_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (kv.count(key)) throw ConfigError("duplicate key: " + key);
    kv[key] = value;
  }

  ExperimentConfig c = default_config();
  const auto take = [&](const std::string& key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };

  if (auto v = take("experiment")) c.experiment = experiment_kind_from_string(*v);
  if (auto v = take("potential.kind")) c.potential_kind = *v;
  if (auto v = take("potential.sigma")) c.potential_sigma = parse_matrix("potential.sigma", *v);
  if (auto v = take("potential.mu")) {
    const auto list = parse_list("potential.mu", *v);
    c.potential_mu = Eigen::Map<const Eigen::VectorXd>(list.data(), list.size());
  }
  if (auto v = take("potential.coeffs")) c.potential_coeffs = parse_list("potential.coeffs", *v);
  if (auto v = take("beta")) c.beta = parse_double("beta", *v);
  if (auto v = take("basis.kind")) c.basis_kind = basis_kind_from_string(*v);
  if (auto v = take("basis.m")) c.basis_m = static_cast<int>(parse_long("basis.m", *v));
  if (auto v = take("basis.l")) c.basis_l = parse_double("basis.l", *v);
  if (auto v = take("theta0")) c.theta0 = parse_list("theta0", *v);
  if (auto v = take("init.sigma0")) c.sigma0 = parse_matrix("init.sigma0", *v);
  if (auto v = take("init.mu0")) {
    const auto list = parse_list("init.mu0", *v);
    c.mu0 = Eigen::Map<const Eigen::VectorXd>(list.data(), list.size());
  }
  if (auto v = take("n")) c.n = static_cast<int>(parse_long("n", *v));
  if (auto v = take("dt")) c.dt = parse_double("dt", *v);
  if (auto v = take("T")) c.horizon = parse_double("T", *v);
  if (auto v = take("seed")) c.seed = parse_u64("seed", *v);
  if (auto v = take("flow.ridge")) c.flow_ridge = *v;
  if (auto v = take("flow.resample")) c.flow_resample = resample_mode_from_string(*v);
  if (auto v = take("flow.snapshot_stride"))
    c.snapshot_stride = static_cast<int>(parse_long("flow.snapshot_stride", *v));
  if (auto v = take("dual.knots")) c.dual_knots = static_cast<int>(parse_long("dual.knots", *v));
  if (auto v = take("dual.padding")) c.dual_padding = parse_double("dual.padding", *v);
  if (auto v = take("dual.tol")) c.dual_tol = parse_double("dual.tol", *v);
  if (auto v = take("dual.max_iters"))
    c.dual_max_iters = static_cast<int>(parse_long("dual.max_iters", *v));
  if (auto v = take("grid.lo")) c.grid_lo = parse_double("grid.lo", *v);
  if (auto v = take("grid.hi")) c.grid_hi = parse_double("grid.hi", *v);
  if (auto v = take("grid.nodes")) c.grid_nodes = static_cast<int>(parse_long("grid.nodes", *v));
  if (auto v = take("fd.dt")) c.fd_dt = *v;
  if (auto v = take("hist.bins")) c.hist_bins = static_cast<int>(parse_long("hist.bins", *v));
  if (auto v = take("hist.lo")) c.hist_lo = parse_double("hist.lo", *v);
  if (auto v = take("hist.hi")) c.hist_hi = parse_double("hist.hi", *v);
  if (auto v = take("output.dir")) c.output_dir = *v;

  if (!kv.empty()) throw ConfigError("unknown key: " + kv.begin()->first);
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  std::string out;
  const auto put = [&](const std::string& key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  };
  put("experiment", to_string(c.experiment));
  put("potential.kind", c.potential_kind);
  put("potential.sigma", matrix_string(c.potential_sigma));
  put("potential.mu", list_string(c.potential_mu));
  put("potential.coeffs", list_string(c.potential_coeffs));
  put("beta", format_double(c.beta));
  put("basis.kind", to_string(c.basis_kind));
  put("basis.m", std::to_string(c.basis_m));
  put("basis.l", format_double(c.basis_l));
  if (!c.theta0.empty()) put("theta0", list_string(c.theta0));
  put("init.sigma0", matrix_string(c.sigma0));
  put("init.mu0", list_string(c.mu0));
  put("n", std::to_string(c.n));
  put("dt", format_double(c.dt));
  put("T", format_double(c.horizon));
  put("seed", std::to_string(c.seed));
  put("flow.ridge", c.flow_ridge);
  put("flow.resample", to_string(c.flow_resample));
  put("flow.snapshot_stride", std::to_string(c.snapshot_stride));
  put("dual.knots", std::to_string(c.dual_knots));
  put("dual.padding", format_double(c.dual_padding));
  put("dual.tol", format_double(c.dual_tol));
  put("dual.max_iters", std::to_string(c.dual_max_iters));
  put("grid.lo", format_double(c.grid_lo));
  put("grid.hi", format_double(c.grid_hi));
  put("grid.nodes", std::to_string(c.grid_nodes));
  put("fd.dt", c.fd_dt);
  put("hist.bins", std::to_string(c.hist_bins));
  put("hist.lo", format_double(c.hist_lo));
  put("hist.hi", format_double(c.hist_hi));
  return out;
}

ExperimentConfig default_config() { return {}; }

}  // namespace pfflow
