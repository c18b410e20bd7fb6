#include "pfflow/potential.hpp"

#include <cmath>

#include "pfflow/errors.hpp"

namespace pfflow {

Potential Potential::quadratic(Eigen::MatrixXd sigma, Eigen::VectorXd mu, double beta) {
  if (sigma.rows() != sigma.cols() || sigma.rows() != mu.size())
    throw Error("quadratic potential: Sigma must be d x d and mu length d");
  if (!(beta >= 0.0)) throw Error("beta must be >= 0");
  if (!sigma.isApprox(sigma.transpose(), 1e-12))
    throw Error("quadratic potential: Sigma must be symmetric");
  Potential p;
  p.kind_ = PotentialKind::quadratic;
  p.beta_ = beta;
  p.dimension_ = static_cast<int>(mu.size());
  p.sigma_ = std::move(sigma);
  p.mu_ = std::move(mu);
  p.sigma_llt_.compute(p.sigma_);
  if (p.sigma_llt_.info() != Eigen::Success)
    throw Error("quadratic potential: Sigma must be positive definite");
  return p;
}

Potential Potential::quadratic1d(double sigma, double mu, double beta) {
  Eigen::MatrixXd s(1, 1);
  s(0, 0) = sigma;
  Eigen::VectorXd m(1);
  m(0) = mu;
  return quadratic(std::move(s), std::move(m), beta);
}

Potential Potential::polynomial(std::vector<double> coeffs, double beta) {
  if (coeffs.empty()) throw Error("polynomial potential: empty coefficient list");
  if (!(beta >= 0.0)) throw Error("beta must be >= 0");
  Potential p;
  p.kind_ = PotentialKind::polynomial;
  p.beta_ = beta;
  p.dimension_ = 1;
  p.coeffs_ = std::move(coeffs);
  return p;
}

Potential Potential::double_well(double beta) {
  // (y+1)^2 (y-1)^2 = y^4 - 2 y^2 + 1
  return polynomial({1.0, 0.0, -2.0, 0.0, 1.0}, beta);
}

double Potential::value(const Eigen::VectorXd& y) const {
  if (kind_ == PotentialKind::quadratic) {
    const Eigen::VectorXd r = y - mu_;
    return 0.5 * r.dot(sigma_llt_.solve(r));
  }
  return value1d(y(0));
}

Eigen::VectorXd Potential::gradient(const Eigen::VectorXd& y) const {
  if (kind_ == PotentialKind::quadratic) return sigma_llt_.solve(y - mu_);
  Eigen::VectorXd g(1);
  g(0) = gradient1d(y(0));
  return g;
}

double Potential::value1d(double y) const {
  if (kind_ == PotentialKind::quadratic) {
    const double r = y - mu_(0);
    return 0.5 * r * r / sigma_(0, 0);
  }
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * y + *it;
  return acc;
}

double Potential::gradient1d(double y) const {
  if (kind_ == PotentialKind::quadratic) return (y - mu_(0)) / sigma_(0, 0);
  double acc = 0.0;
  for (size_t i = coeffs_.size(); i-- > 1;) acc = acc * y + coeffs_[i] * static_cast<double>(i);
  return acc;
}

Eigen::VectorXd Potential::sigma_solve(const Eigen::VectorXd& r) const {
  if (kind_ != PotentialKind::quadratic) throw Error("sigma_solve needs a quadratic potential");
  return sigma_llt_.solve(r);
}

Eigen::MatrixXd Potential::sigma_solve_matrix(const Eigen::MatrixXd& r) const {
  if (kind_ != PotentialKind::quadratic) throw Error("sigma_solve needs a quadratic potential");
  return sigma_llt_.solve(r);
}

}  // namespace pfflow
