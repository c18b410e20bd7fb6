#include "pfflow/free_energy.hpp"

#include <cmath>
#include <numbers>

#include "pfflow/errors.hpp"

namespace pfflow {

double potential_term(const PushforwardMap1D& map, const ParticleEnsemble& ensemble,
                      const Potential& V) {
  if (ensemble.provenance != Provenance::reference)
    throw Error("potential_term: ensemble must be reference samples");
  const int n = ensemble.count();
  double acc = 0.0;
  for (int s = 0; s < n; ++s) acc += V.value1d(map.value(ensemble.points(s, 0)));
  return acc / n;
}

FreeEnergyEstimate free_energy(const PushforwardMap1D& map,
                               const ParticleEnsemble& ensemble, const Potential& V,
                               const DualGridSpec& grid, const DualAscentParams& params,
                               const DualPotential* warm_start) {
  const int n = ensemble.count();
  const double beta = V.beta();

  FreeEnergyEstimate est;
  est.sample_count = n;

  if (beta == 0.0) {
    // no entropy contribution; estimate the potential term and its spread
    double acc = 0.0, acc2 = 0.0;
    for (int s = 0; s < n; ++s) {
      const double v = V.value1d(map.value(ensemble.points(s, 0)));
      acc += v;
      acc2 += v * v;
    }
    est.potential_term = acc / n;
    est.entropy_term = 0.0;
    est.value = est.potential_term;
    const double var = std::max(0.0, acc2 / n - est.potential_term * est.potential_term);
    est.std_error = std::sqrt(var / n);
    return est;
  }

  DualSolveResult dual = solve_dual_entropy(map, ensemble, grid, params, warm_start);
  est.entropy_term = dual.entropy;
  est.tail_warning = dual.tail_warning;

  // single pass for the potential term and the per-sample spread of
  // V(Y) + beta h*(Y), which drives the MC standard error of F
  double acc = 0.0, acc_vh = 0.0, acc_vh2 = 0.0;
  for (int s = 0; s < n; ++s) {
    const double y = map.value(ensemble.points(s, 0));
    const double v = V.value1d(y);
    const double vh = v + beta * dual.witness.value(y);
    acc += v;
    acc_vh += vh;
    acc_vh2 += vh * vh;
  }
  est.potential_term = acc / n;
  est.value = est.potential_term + beta * est.entropy_term;
  const double mean_vh = acc_vh / n;
  const double var = std::max(0.0, acc_vh2 / n - mean_vh * mean_vh);
  est.std_error = std::sqrt(var / n);
  est.witness = std::move(dual.witness);
  return est;
}

Eigen::VectorXd grad_free_energy(const PushforwardMap1D& map,
                                 const ParticleEnsemble& ensemble, const Potential& V,
                                 const DualPotential* witness) {
  if (ensemble.provenance != Provenance::reference)
    throw Error("grad_free_energy: ensemble must be reference samples");
  const double beta = V.beta();
  if (beta != 0.0 && witness == nullptr)
    throw Error("grad_free_energy: beta > 0 needs the dual witness");
  const int m = map.basis.size();
  const int n = ensemble.count();

  Eigen::VectorXd acc = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd phi(m);
  for (int s = 0; s < n; ++s) {
    const double x = ensemble.points(s, 0);
    const double y = map.value(x);
    double pull = V.gradient1d(y);
    if (beta != 0.0) pull += beta * witness->derivative(y);
    map.basis.values(x, std::span<double>(phi.data(), static_cast<size_t>(m)));
    acc += pull * phi;
  }
  return acc / n;
}

double entropy_change_of_variables(const PushforwardMap1D& map,
                                   const ParticleEnsemble& ensemble) {
  if (ensemble.provenance != Provenance::reference)
    throw Error("entropy_change_of_variables: ensemble must be reference samples");
  if (ensemble.dimension() != 1)
    throw Error("entropy_change_of_variables: requires d = 1");
  const int n = ensemble.count();
  const double log_norm = -0.5 * std::log(2.0 * std::numbers::pi);
  double acc = 0.0;
  for (int s = 0; s < n; ++s) {
    const double x = ensemble.points(s, 0);
    const double slope = map.derivative(x);
    if (!(slope > 0.0))
      throw NonMonotoneMapError("entropy_change_of_variables: T' <= 0 at a sample point");
    acc += log_norm - 0.5 * x * x - std::log(slope);
  }
  return acc / n;
}

}  // namespace pfflow
