#include "pfflow/dual_entropy.hpp"

#include <cmath>

#include "pfflow/errors.hpp"

namespace pfflow {

DualGridSpec DualGridSpec::for_basis(const BasisSet& basis, double padding, int knots) {
  return {-basis.halfwidth() - padding, basis.halfwidth() + padding, knots};
}

DualPotential::DualPotential(DualGridSpec grid, Eigen::VectorXd knot_values)
    : grid_(grid), values_(std::move(knot_values)) {
  if (grid_.knots < 2) throw Error("dual grid needs at least 2 knots");
  if (!(grid_.hi > grid_.lo)) throw Error("dual grid needs hi > lo");
  if (values_.size() != grid_.knots) throw Error("dual knot value count mismatch");
  if (!values_.allFinite()) throw Error("dual knot values must be finite");
}

double DualPotential::value(double x) const {
  if (x <= grid_.lo) return values_[0];
  if (x >= grid_.hi) return values_[grid_.knots - 1];
  const double dx = grid_.spacing();
  double pos = (x - grid_.lo) / dx;
  int cell = static_cast<int>(pos);
  if (cell >= grid_.knots - 1) cell = grid_.knots - 2;
  const double w = pos - cell;
  return (1.0 - w) * values_[cell] + w * values_[cell + 1];
}

double DualPotential::derivative(double x) const {
  // left limit: the slope of the cell ending at x
  if (x <= grid_.lo || x > grid_.hi) return 0.0;
  const double dx = grid_.spacing();
  int cell = static_cast<int>(std::ceil((x - grid_.lo) / dx)) - 1;
  if (cell < 0) cell = 0;
  if (cell > grid_.knots - 2) cell = grid_.knots - 2;
  return (values_[cell + 1] - values_[cell]) / dx;
}

double DualPotential::exp_integral() const {
  const double dx = grid_.spacing();
  double acc = 0.5 * (std::exp(values_[0]) + std::exp(values_[grid_.knots - 1]));
  for (int j = 1; j < grid_.knots - 1; ++j) acc += std::exp(values_[j]);
  return acc * dx;
}

namespace {

// Interpolation-weight histogram of the pushed samples: mass[j] is the total
// hat weight of knot j, so (1/n) sum_s h(Y_s) == mass . h for every h on the
// grid. Points beyond the ends load the boundary knot.
struct SampleMass {
  Eigen::VectorXd mass;
  double outside_fraction;
};

SampleMass accumulate_mass(const PushforwardMap1D& map, const ParticleEnsemble& ensemble,
                           const DualGridSpec& grid) {
  const int n = ensemble.count();
  const double dx = grid.spacing();
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(grid.knots);
  long outside = 0;
  for (int s = 0; s < n; ++s) {
    const double y = map.value(ensemble.points(s, 0));
    if (!std::isfinite(y)) throw DualSolveError("dual solve: non-finite pushed sample");
    if (y <= grid.lo) {
      mass[0] += 1.0;
      if (y < grid.lo) ++outside;
      continue;
    }
    if (y >= grid.hi) {
      mass[grid.knots - 1] += 1.0;
      if (y > grid.hi) ++outside;
      continue;
    }
    double pos = (y - grid.lo) / dx;
    int cell = static_cast<int>(pos);
    if (cell >= grid.knots - 1) cell = grid.knots - 2;
    const double w = pos - cell;
    mass[cell] += 1.0 - w;
    mass[cell + 1] += w;
  }
  mass /= n;
  return {std::move(mass), static_cast<double>(outside) / n};
}

}  // namespace

DualSolveResult solve_dual_entropy(const PushforwardMap1D& map,
                                   const ParticleEnsemble& ensemble,
                                   const DualGridSpec& grid,
                                   const DualAscentParams& params,
                                   const DualPotential* warm_start) {
  if (ensemble.dimension() != 1) throw Error("solve_dual_entropy: requires d = 1");
  if (ensemble.provenance != Provenance::reference)
    throw Error("solve_dual_entropy: ensemble must be reference samples");

  const int K = grid.knots;
  const double dx = grid.spacing();
  const auto [mass, outside_fraction] = accumulate_mass(map, ensemble, grid);

  // trapezoid weights
  Eigen::VectorXd quad = Eigen::VectorXd::Constant(K, dx);
  quad[0] = quad[K - 1] = 0.5 * dx;

  Eigen::VectorXd h = Eigen::VectorXd::Zero(K);
  if (warm_start != nullptr) {
    if (warm_start->grid().knots != K || warm_start->grid().lo != grid.lo ||
        warm_start->grid().hi != grid.hi)
      throw Error("solve_dual_entropy: warm start grid mismatch");
    h = warm_start->knot_values();
  }

  const auto objective = [&](const Eigen::VectorXd& v) {
    return mass.dot(v) - quad.dot(v.array().exp().matrix());
  };

  double J = objective(h);
  if (!std::isfinite(J)) throw DualSolveError("dual solve: non-finite objective at start");

  Eigen::VectorXd grad(K), trial(K);
  double step = 1.0;
  int iters = 0;
  double sup = 0.0;
  for (; iters < params.max_iters; ++iters) {
    grad = mass - (quad.array() * h.array().exp()).matrix();
    sup = grad.cwiseAbs().maxCoeff();
    if (sup <= params.tol) break;

    // backtracking line search with Armijo condition; the accepted step
    // doubles as the next initial step
    const double g2 = grad.squaredNorm();
    bool accepted = false;
    for (int back = 0; back < 60; ++back) {
      trial = h + step * grad;
      const double Jt = objective(trial);
      if (std::isfinite(Jt) && Jt >= J + 1e-4 * step * g2) {
        h.swap(trial);
        J = Jt;
        step *= 2.0;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // step underflow: no ascent direction progress left
  }
  if (!std::isfinite(J)) throw DualSolveError("dual solve: objective diverged");

  DualPotential witness(grid, h);
  DualSolveResult result{std::move(witness)};
  result.sample_term = mass.dot(h);
  result.exp_integral = quad.dot(h.array().exp().matrix());
  result.entropy = result.sample_term - result.exp_integral + 1.0;
  result.iterations = iters;
  result.grad_sup_norm = sup;
  result.outside_fraction = outside_fraction;
  result.tail_warning = outside_fraction > 1e-3;
  return result;
}

}  // namespace pfflow
