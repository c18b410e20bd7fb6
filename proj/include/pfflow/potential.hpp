#pragma once

#include <Eigen/Core>
#include <Eigen/Cholesky>
#include <vector>

namespace pfflow {

enum class PotentialKind { quadratic, polynomial };

// Drift potential V together with the diffusion constant beta of the
// equation d rho/dt = div(rho grad V) + beta Laplace(rho).
//
// quadratic: V(y) = (y-mu)^T Sigma^{-1} (y-mu) / 2 with Sigma SPD.
// polynomial: 1D V(y) = sum_i c_i y^i.
class Potential {
 public:
  static Potential quadratic(Eigen::MatrixXd sigma, Eigen::VectorXd mu, double beta);
  static Potential quadratic1d(double sigma, double mu, double beta);
  static Potential polynomial(std::vector<double> coeffs, double beta);
  // V(y) = (y+1)^2 (y-1)^2, the bistable benchmark potential.
  static Potential double_well(double beta);

  PotentialKind kind() const { return kind_; }
  double beta() const { return beta_; }
  int dimension() const { return dimension_; }

  double value(const Eigen::VectorXd& y) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& y) const;

  // 1D fast paths (valid when dimension() == 1).
  double value1d(double y) const;
  double gradient1d(double y) const;

  const Eigen::MatrixXd& sigma() const { return sigma_; }
  const Eigen::VectorXd& mu() const { return mu_; }
  const std::vector<double>& coefficients() const { return coeffs_; }
  // Solves Sigma z = r (quadratic kind only).
  Eigen::VectorXd sigma_solve(const Eigen::VectorXd& r) const;
  Eigen::MatrixXd sigma_solve_matrix(const Eigen::MatrixXd& r) const;

 private:
  Potential() = default;

  PotentialKind kind_ = PotentialKind::quadratic;
  double beta_ = 0.0;
  int dimension_ = 1;
  Eigen::MatrixXd sigma_;
  Eigen::VectorXd mu_;
  Eigen::LLT<Eigen::MatrixXd> sigma_llt_;
  std::vector<double> coeffs_;
};

}  // namespace pfflow
