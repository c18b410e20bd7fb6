#pragma once

#include <Eigen/Core>
#include <span>
#include <string>

namespace pfflow {

enum class BasisKind { sinusoidal, hat, polynomial };

std::string to_string(BasisKind kind);
BasisKind basis_kind_from_string(const std::string& name);

// Family of m basis functions on [-l, l].
//
// sinusoidal: {1, x, sin(pi x/l), cos(pi x/l), sin(2 pi x/l), ...} truncated
//   to m entries; the trigonometric part evaluates by its periodic formula
//   everywhere, so the affine leading terms keep mean and scale representable
//   on all of R.
// hat: m piecewise-linear hats on uniformly spaced knots over [-l, l],
//   boundary knots carrying half-hats; zero outside [-l, l]. They form a
//   partition of unity on [-l, l].
// polynomial: monomials {1, x, x^2, ...}.
class BasisSet {
 public:
  BasisSet(BasisKind kind, int count, double halfwidth);

  BasisKind kind() const { return kind_; }
  int size() const { return count_; }
  double halfwidth() const { return halfwidth_; }

  double value(int k, double x) const;
  // Weak derivative; hats use the left-limit convention at knots.
  double derivative(int k, double x) const;

  void values(double x, std::span<double> out) const;
  Eigen::VectorXd values(double x) const;
  double derivative_sum(double x, const Eigen::VectorXd& coeffs) const;

 private:
  BasisKind kind_;
  int count_;
  double halfwidth_;
  double knot_spacing_;  // hats only
};

// T_theta(x) = sum_k theta_k phi_k(x); linear in theta, so the parameter
// gradient of the map is the basis vector itself.
struct PushforwardMap1D {
  BasisSet basis;
  Eigen::VectorXd theta;

  PushforwardMap1D(BasisSet b, Eigen::VectorXd t);

  double value(double x) const;
  // dT/dx at x, needed by the change-of-variables entropy oracle.
  double derivative(double x) const;
};

inline double eval_map(const PushforwardMap1D& map, double x) { return map.value(x); }

// (phi_1(x), ..., phi_m(x)) = dT_theta(x)/dtheta.
Eigen::VectorXd grad_theta_map(const PushforwardMap1D& map, double x);

}  // namespace pfflow
