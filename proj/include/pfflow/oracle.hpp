#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>

#include "pfflow/potential.hpp"
#include "pfflow/rng.hpp"
#include "pfflow/sampling.hpp"

namespace pfflow {

// Discretized 1D density: node values on a uniform grid over [lo, hi],
// normalized so that sum(values) * dx == 1.
struct GridDensity {
  double lo = -3.0;
  double hi = 3.0;
  Eigen::VectorXd values;

  int nodes() const { return static_cast<int>(values.size()); }
  double dx() const { return (hi - lo) / (values.size() - 1); }
  double node(int i) const { return lo + i * dx(); }

  double mass() const;
  double mean() const;
  double variance() const;
  // Piecewise-linear CDF evaluated at x.
  double cdf(double x) const;
};

// Pointwise evaluation of an unnormalized density, then renormalization.
GridDensity discretize_density(const std::function<double(double)>& density, double lo,
                               double hi, int nodes);

// Explicit stability bound dt <= dx^2 / (2 beta + dx max|V'|).
double fd_stable_dt(const GridDensity& rho, const Potential& V);

// Conservative finite-volume step scheme for
//   d rho/dt = d/dx (rho V') + beta d2 rho/dx2
// with upwinded drift flux, centered diffusion and zero-flux boundaries.
// Rejects dt above the stability bound. Mass is conserved to machine
// precision by construction.
GridDensity fd_solve(const GridDensity& rho0, const Potential& V, double dt,
                     double horizon);

// Samples one particle from rho_0.
using InitialSampler = std::function<double(NormalStream&)>;

// Euler-Maruyama for dX = -V'(X) dt + sqrt(2 beta) dB, one derived stream
// per particle.
ParticleEnsemble sde_simulate(int n, const Potential& V, const InitialSampler& rho0,
                              double dt, double horizon, std::uint64_t seed);

// Normalized exp(-V/beta) on the grid.
GridDensity gibbs_density(const Potential& V, double lo, double hi, int nodes);

// W1 distance = integral of |CDF_a - CDF_b|, exact for the piecewise
// representations used here (step CDFs for samples, piecewise-linear CDFs
// for grid densities).
double wasserstein1(const ParticleEnsemble& a, const ParticleEnsemble& b);
double wasserstein1(const ParticleEnsemble& a, const GridDensity& b);
double wasserstein1(const GridDensity& a, const GridDensity& b);

}  // namespace pfflow
