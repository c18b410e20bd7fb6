#include "pfflow/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "pfflow/errors.hpp"

namespace pfflow {

double GridDensity::mass() const { return values.sum() * dx(); }

double GridDensity::mean() const {
  const int n = nodes();
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += node(i) * values[i];
  return acc * dx() / mass();
}

double GridDensity::variance() const {
  const double m = mean();
  const int n = nodes();
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = node(i) - m;
    acc += r * r * values[i];
  }
  return acc * dx() / mass();
}

double GridDensity::cdf(double x) const {
  // density is piecewise constant on cells [node - dx/2, node + dx/2]
  const double h = dx();
  const double left = lo - 0.5 * h;
  if (x <= left) return 0.0;
  double acc = 0.0;
  for (int i = 0; i < nodes(); ++i) {
    const double cell_left = left + i * h;
    const double cell_right = cell_left + h;
    if (x >= cell_right) {
      acc += values[i] * h;
    } else {
      acc += values[i] * (x - cell_left);
      break;
    }
  }
  return acc;
}

GridDensity discretize_density(const std::function<double(double)>& density, double lo,
                               double hi, int nodes) {
  if (nodes < 2) throw Error("discretize_density: need at least 2 nodes");
  if (!(hi > lo)) throw Error("discretize_density: need hi > lo");
  GridDensity rho{lo, hi, Eigen::VectorXd(nodes)};
  for (int i = 0; i < nodes; ++i) {
    const double v = density(rho.node(i));
    if (!(v >= 0.0) || !std::isfinite(v))
      throw Error("discretize_density: density values must be finite and >= 0");
    rho.values[i] = v;
  }
  const double total = rho.values.sum() * rho.dx();
  if (!(total > 0.0)) throw Error("discretize_density: density is zero everywhere");
  rho.values /= total;
  return rho;
}

namespace {

double max_abs_drift(const GridDensity& rho, const Potential& V) {
  double vmax = 0.0;
  for (int i = 0; i < rho.nodes(); ++i)
    vmax = std::max(vmax, std::abs(V.gradient1d(rho.node(i))));
  return vmax;
}

}  // namespace

double fd_stable_dt(const GridDensity& rho, const Potential& V) {
  const double h = rho.dx();
  return h * h / (2.0 * V.beta() + h * max_abs_drift(rho, V));
}

GridDensity fd_solve(const GridDensity& rho0, const Potential& V, double dt,
                     double horizon) {
  if (!(dt > 0.0)) throw Error("fd_solve: dt must be positive");
  if (horizon < 0.0) throw Error("fd_solve: horizon must be >= 0");
  const double bound = fd_stable_dt(rho0, V);
  if (dt > bound * (1.0 + 1e-12))
    throw StabilityError("fd_solve: dt exceeds the stability bound");

  const int n = rho0.nodes();
  const double h = rho0.dx();
  const double beta = V.beta();

  // face-centered drift velocities u = -V'
  Eigen::VectorXd u(n - 1);
  for (int i = 0; i + 1 < n; ++i) u[i] = -V.gradient1d(rho0.node(i) + 0.5 * h);

  GridDensity rho = rho0;
  Eigen::VectorXd flux(n - 1);
  const auto step = [&](double tau) {
    for (int i = 0; i + 1 < n; ++i) {
      const double upwind = u[i] > 0.0 ? rho.values[i] : rho.values[i + 1];
      flux[i] = u[i] * upwind - beta * (rho.values[i + 1] - rho.values[i]) / h;
    }
    // zero-flux boundaries
    rho.values[0] -= tau / h * flux[0];
    for (int i = 1; i + 1 < n; ++i) rho.values[i] -= tau / h * (flux[i] - flux[i - 1]);
    rho.values[n - 1] += tau / h * flux[n - 2];
  };

  const long full = static_cast<long>(std::floor(horizon / dt + 1e-9));
  for (long k = 0; k < full; ++k) step(dt);
  const double rem = horizon - full * dt;
  if (rem > 1e-12 * std::max(1.0, horizon)) step(rem);
  return rho;
}

ParticleEnsemble sde_simulate(int n, const Potential& V, const InitialSampler& rho0,
                              double dt, double horizon, std::uint64_t seed) {
  if (n <= 0) throw Error("sde_simulate: n must be positive");
  if (!(dt > 0.0)) throw Error("sde_simulate: dt must be positive");
  const double beta = V.beta();
  const long full = static_cast<long>(std::floor(horizon / dt + 1e-9));
  const double rem = horizon - full * dt;
  const bool has_rem = rem > 1e-12 * std::max(1.0, horizon);
  const double noise = std::sqrt(2.0 * beta * dt);
  const double noise_rem = std::sqrt(2.0 * beta * rem);

  Eigen::MatrixXd points(n, 1);
  for (int i = 0; i < n; ++i) {
    NormalStream stream(seed, "sde", static_cast<std::uint64_t>(i));
    double x = rho0(stream);
    for (long k = 0; k < full; ++k)
      x += -V.gradient1d(x) * dt + noise * stream.next();
    if (has_rem) x += -V.gradient1d(x) * rem + noise_rem * stream.next();
    points(i, 0) = x;
  }
  return {std::move(points), Provenance::sde};
}

GridDensity gibbs_density(const Potential& V, double lo, double hi, int nodes) {
  if (!(V.beta() > 0.0)) throw Error("gibbs_density: beta must be positive");
  GridDensity rho{lo, hi, Eigen::VectorXd(nodes)};
  if (nodes < 2) throw Error("gibbs_density: need at least 2 nodes");
  for (int i = 0; i < nodes; ++i)
    rho.values[i] = std::exp(-V.value1d(rho.node(i)) / V.beta());
  const double total = rho.values.sum() * rho.dx();
  if (!(total > 0.0))
    throw Error("gibbs_density: exp(-V/beta) underflowed to zero on the grid");
  rho.values /= total;
  return rho;
}

namespace {

// Right-continuous CDF with its breakpoints; piecewise linear between
// breakpoints, constant outside. Covers both empirical (step) and grid
// (piecewise-linear) distribution functions.
class CdfView {
 public:
  explicit CdfView(const ParticleEnsemble& e) {
    if (e.dimension() != 1) throw Error("wasserstein1: requires d = 1");
    if (e.count() == 0) throw Error("wasserstein1: empty sample set");
    xs_.assign(e.points.col(0).data(), e.points.col(0).data() + e.count());
    std::sort(xs_.begin(), xs_.end());
    step_ = true;
  }

  explicit CdfView(const GridDensity& g) {
    const int n = g.nodes();
    if (n < 1) throw Error("wasserstein1: empty grid density");
    const double h = g.dx();
    const double total = g.values.sum() * h;
    if (!(total > 0.0)) throw Error("wasserstein1: zero-mass grid density");
    xs_.resize(n + 1);
    cum_.resize(n + 1);
    xs_[0] = g.lo - 0.5 * h;
    cum_[0] = 0.0;
    for (int i = 0; i < n; ++i) {
      xs_[i + 1] = xs_[i] + h;
      cum_[i + 1] = cum_[i] + g.values[i] * h / total;
    }
    cum_[n] = 1.0;
    step_ = false;
  }

  const std::vector<double>& breakpoints() const { return xs_; }

  // F(x+) and F(x-)
  double right(double x) const {
    if (step_) {
      const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
      return static_cast<double>(it - xs_.begin()) / xs_.size();
    }
    return linear(x);
  }

  double left(double x) const {
    if (step_) {
      const auto it = std::lower_bound(xs_.begin(), xs_.end(), x);
      return static_cast<double>(it - xs_.begin()) / xs_.size();
    }
    return linear(x);
  }

 private:
  double linear(double x) const {
    if (x <= xs_.front()) return 0.0;
    if (x >= xs_.back()) return 1.0;
    const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    const size_t j = static_cast<size_t>(it - xs_.begin()) - 1;
    const double w = (x - xs_[j]) / (xs_[j + 1] - xs_[j]);
    return cum_[j] + w * (cum_[j + 1] - cum_[j]);
  }

  std::vector<double> xs_;
  std::vector<double> cum_;
  bool step_ = false;
};

// integral of |F_a - F_b| over R: both CDFs are linear on every open segment
// between merged breakpoints, so each segment integrates exactly.
double w1_from_views(const CdfView& a, const CdfView& b) {
  std::vector<double> pts;
  pts.reserve(a.breakpoints().size() + b.breakpoints().size());
  pts.insert(pts.end(), a.breakpoints().begin(), a.breakpoints().end());
  pts.insert(pts.end(), b.breakpoints().begin(), b.breakpoints().end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  double acc = 0.0;
  for (size_t k = 0; k + 1 < pts.size(); ++k) {
    const double u = pts[k], v = pts[k + 1];
    const double d0 = a.right(u) - b.right(u);
    const double d1 = a.left(v) - b.left(v);
    const double len = v - u;
    if (d0 == 0.0 && d1 == 0.0) continue;
    if (d0 * d1 >= 0.0) {
      acc += 0.5 * (std::abs(d0) + std::abs(d1)) * len;
    } else {
      acc += 0.5 * len * (d0 * d0 + d1 * d1) / std::abs(d0 - d1);
    }
  }
  return acc;
}

}  // namespace

double wasserstein1(const ParticleEnsemble& a, const ParticleEnsemble& b) {
  return w1_from_views(CdfView(a), CdfView(b));
}

double wasserstein1(const ParticleEnsemble& a, const GridDensity& b) {
  return w1_from_views(CdfView(a), CdfView(b));
}

double wasserstein1(const GridDensity& a, const GridDensity& b) {
  return w1_from_views(CdfView(a), CdfView(b));
}

}  // namespace pfflow
