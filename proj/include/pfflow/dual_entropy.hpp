#pragma once

#include <Eigen/Core>
#include <optional>

#include "pfflow/basis.hpp"
#include "pfflow/sampling.hpp"

namespace pfflow {

// Uniform knot grid for the dual potential h.
struct DualGridSpec {
  double lo = -7.0;
  double hi = 7.0;
  int knots = 201;

  double spacing() const { return (hi - lo) / (knots - 1); }
  // Default placement: basis support padded by 4 on each side.
  static DualGridSpec for_basis(const BasisSet& basis, double padding = 4.0,
                                int knots = 201);
};

struct DualAscentParams {
  double tol = 1e-6;       // sup-norm of the ascent gradient
  int max_iters = 5000;
};

// Piecewise-linear dual potential on a uniform grid, constant outside
// [lo, hi]. The weak derivative is piecewise constant; values at knots use
// the left-limit convention, and the constant tails have derivative zero.
class DualPotential {
 public:
  DualPotential(DualGridSpec grid, Eigen::VectorXd knot_values);

  double value(double x) const;
  double derivative(double x) const;

  // Trapezoid quadrature of exp(h) over [lo, hi]; the constant tails are
  // excluded (they would make the integral divergent).
  double exp_integral() const;

  const DualGridSpec& grid() const { return grid_; }
  const Eigen::VectorXd& knot_values() const { return values_; }

 private:
  DualGridSpec grid_;
  Eigen::VectorXd values_;
};

struct DualSolveResult {
  DualPotential witness;
  double sample_term = 0.0;    // (1/n) sum_s h*(T_theta(X_s))
  double exp_integral = 0.0;   // integral of exp(h*) over the grid
  double entropy = 0.0;        // sample_term - exp_integral + 1
  int iterations = 0;
  double grad_sup_norm = 0.0;
  double outside_fraction = 0.0;  // sample mass beyond the grid ends
  bool tail_warning = false;      // outside_fraction > 1e-3
};

// Maximizes the concave dual objective
//   J(h) = (1/n) sum_s h(T_theta(X_s)) - int_[lo,hi] exp(h) dx
// over piecewise-linear h by full-batch gradient ascent with backtracking
// line search. J(h*) + 1 estimates int rho_theta log rho_theta from below.
// Samples beyond the grid contribute their clamped boundary value and are
// counted in outside_fraction.
DualSolveResult solve_dual_entropy(const PushforwardMap1D& map,
                                   const ParticleEnsemble& ensemble,
                                   const DualGridSpec& grid,
                                   const DualAscentParams& params = {},
                                   const DualPotential* warm_start = nullptr);

}  // namespace pfflow
