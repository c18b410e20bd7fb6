#include "pfflow/gaussian_affine.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "pfflow/errors.hpp"

namespace pfflow {

AffineMap::AffineMap(Eigen::MatrixXd g, Eigen::VectorXd b)
    : gamma(std::move(g)), shift(std::move(b)) {
  if (gamma.rows() != gamma.cols() || gamma.rows() != shift.size())
    throw Error("AffineMap: Gamma must be d x d and b length d");
  if (!(gamma.determinant() > 0.0)) throw Error("AffineMap: det(Gamma) must be positive");
}

AffineRhs affine_rhs(const AffineState& state, const Potential& V) {
  if (V.kind() != PotentialKind::quadratic)
    throw Error("affine_rhs: potential must be quadratic");
  const int d = V.dimension();
  if (state.gamma.rows() != d || state.shift.size() != d)
    throw Error("affine_rhs: state dimension mismatch");

  const double det = state.gamma.determinant();
  if (!(std::abs(det) > 1e-300) || !std::isfinite(det))
    throw Error("affine_rhs: Gamma is numerically singular");

  AffineRhs rhs;
  rhs.dgamma = -V.sigma_solve_matrix(state.gamma);
  if (V.beta() != 0.0) {
    // Gamma^{-T} by factorization-based solve of Gamma^T
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(state.gamma.transpose());
    rhs.dgamma += V.beta() * lu.solve(Eigen::MatrixXd::Identity(d, d));
  }
  rhs.dshift = V.sigma_solve(V.mu() - state.shift);
  return rhs;
}

Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& A) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  if (es.info() != Eigen::Success) throw Error("spd_sqrt: eigendecomposition failed");
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw Error("spd_sqrt: matrix is not positive definite");
  return es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

std::vector<AffineState> integrate_affine(const Eigen::MatrixXd& sigma0,
                                          const Eigen::VectorXd& mu0,
                                          const Potential& V, double dt,
                                          double horizon) {
  if (!(dt > 0.0)) throw Error("integrate_affine: dt must be positive");
  if (horizon < 0.0) throw Error("integrate_affine: horizon must be >= 0");

  AffineState state{spd_sqrt(sigma0), mu0, 0.0};
  const int steps = static_cast<int>(std::llround(horizon / dt));

  std::vector<AffineState> out;
  out.reserve(steps + 1);
  out.push_back(state);

  for (int k = 0; k < steps; ++k) {
    const AffineRhs k1 = affine_rhs(state, V);
    AffineState mid1{state.gamma + 0.5 * dt * k1.dgamma,
                     state.shift + 0.5 * dt * k1.dshift, state.time + 0.5 * dt};
    const AffineRhs k2 = affine_rhs(mid1, V);
    AffineState mid2{state.gamma + 0.5 * dt * k2.dgamma,
                     state.shift + 0.5 * dt * k2.dshift, state.time + 0.5 * dt};
    const AffineRhs k3 = affine_rhs(mid2, V);
    AffineState end{state.gamma + dt * k3.dgamma, state.shift + dt * k3.dshift,
                    state.time + dt};
    const AffineRhs k4 = affine_rhs(end, V);

    state.gamma += (dt / 6.0) * (k1.dgamma + 2.0 * k2.dgamma + 2.0 * k3.dgamma + k4.dgamma);
    state.shift += (dt / 6.0) * (k1.dshift + 2.0 * k2.dshift + 2.0 * k3.dshift + k4.dshift);
    state.time = (k + 1) * dt;

    if (!(state.gamma.determinant() > 0.0))
      throw Error("integrate_affine: det(Gamma) crossed zero");
    out.push_back(state);
  }
  return out;
}

GaussianMoments gaussian_moments(const AffineState& state) {
  return {state.shift, state.gamma * state.gamma.transpose()};
}

double gaussian_free_energy(const AffineState& state, const Potential& V) {
  if (V.kind() != PotentialKind::quadratic)
    throw Error("gaussian_free_energy: potential must be quadratic");
  const int d = V.dimension();
  const Eigen::MatrixXd cov = state.gamma * state.gamma.transpose();
  const Eigen::VectorXd r = state.shift - V.mu();
  const double potential =
      0.5 * (r.dot(V.sigma_solve(r)) + V.sigma_solve_matrix(cov).trace());
  // int rho log rho = -(d/2) log(2 pi e) - log det Gamma
  const double logdet = std::log(state.gamma.determinant());
  const double neg_entropy =
      -0.5 * d * std::log(2.0 * std::numbers::pi * std::numbers::e) - logdet;
  return potential + V.beta() * neg_entropy;
}

ParticleEnsemble pushforward_samples(const AffineMap& map, const ParticleEnsemble& ensemble) {
  if (ensemble.provenance != Provenance::reference)
    throw Error("pushforward_samples: ensemble must be reference samples");
  if (ensemble.dimension() != map.dimension())
    throw Error("pushforward_samples: dimension mismatch");
  Eigen::MatrixXd out = ensemble.points * map.gamma.transpose();
  out.rowwise() += map.shift.transpose();
  if (!out.allFinite()) throw Error("pushforward_samples: non-finite image point");
  return {std::move(out), Provenance::pushforward};
}

}  // namespace pfflow
