#pragma once

#include <Eigen/Core>
#include <vector>

#include "pfflow/potential.hpp"
#include "pfflow/sampling.hpp"

namespace pfflow {

// Affine pushforward T(x) = Gamma x + b with det(Gamma) > 0.
struct AffineMap {
  Eigen::MatrixXd gamma;
  Eigen::VectorXd shift;

  AffineMap(Eigen::MatrixXd g, Eigen::VectorXd b);
  int dimension() const { return static_cast<int>(shift.size()); }
};

struct AffineState {
  Eigen::MatrixXd gamma;
  Eigen::VectorXd shift;
  double time = 0.0;
};

struct AffineRhs {
  Eigen::MatrixXd dgamma;
  Eigen::VectorXd dshift;
};

// Exact parameter ODE for quadratic V:
//   dGamma/dt = -Sigma^{-1} Gamma + beta Gamma^{-T}
//   db/dt     =  Sigma^{-1} (mu - b)
// Vanishes iff Gamma Gamma^T = beta Sigma and b = mu.
AffineRhs affine_rhs(const AffineState& state, const Potential& V);

// Principal SPD square root via eigendecomposition.
Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& A);

// Classical RK4 integration from Gamma_0 = sqrt(Sigma_0), b_0 = mu_0,
// recording every step. det(Gamma) > 0 is monitored; a sign crossing aborts.
std::vector<AffineState> integrate_affine(const Eigen::MatrixXd& sigma0,
                                          const Eigen::VectorXd& mu0,
                                          const Potential& V, double dt,
                                          double horizon);

struct GaussianMoments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

// rho_t = N(b, Gamma Gamma^T): the affine image of N(0, I).
GaussianMoments gaussian_moments(const AffineState& state);

// Closed-form F(rho) for a Gaussian rho = N(b, Gamma Gamma^T) under
// quadratic V: E[V] + beta * int rho log rho.
double gaussian_free_energy(const AffineState& state, const Potential& V);

// Pointwise affine image of a reference ensemble.
ParticleEnsemble pushforward_samples(const AffineMap& map, const ParticleEnsemble& ensemble);

}  // namespace pfflow
