#pragma once

#include <Eigen/Core>
#include <optional>

#include "pfflow/basis.hpp"
#include "pfflow/dual_entropy.hpp"
#include "pfflow/potential.hpp"
#include "pfflow/sampling.hpp"

namespace pfflow {

// F(theta) = int V rho_theta + beta int rho_theta log rho_theta, estimated
// over reference samples with the dual witness h* standing in for log rho.
struct FreeEnergyEstimate {
  double value = 0.0;
  double potential_term = 0.0;
  double entropy_term = 0.0;
  std::optional<DualPotential> witness;
  int sample_count = 0;
  double std_error = 0.0;  // MC standard error of `value`
  bool tail_warning = false;
};

// (1/n) sum_s V(T_theta(X_s)).
double potential_term(const PushforwardMap1D& map, const ParticleEnsemble& ensemble,
                      const Potential& V);

// Assembles both terms; value = potential_term + beta * entropy_term exactly.
// With beta == 0 the dual solve is skipped and entropy_term is 0.
FreeEnergyEstimate free_energy(const PushforwardMap1D& map,
                               const ParticleEnsemble& ensemble, const Potential& V,
                               const DualGridSpec& grid,
                               const DualAscentParams& params = {},
                               const DualPotential* warm_start = nullptr);

// Envelope-theorem gradient:
// (1/n) sum_s phi(X_s) * (V'(Y_s) + beta h*'(Y_s)), Y_s = T_theta(X_s).
// `witness` must come from the same (map, ensemble); pass nullptr when
// beta == 0.
Eigen::VectorXd grad_free_energy(const PushforwardMap1D& map,
                                 const ParticleEnsemble& ensemble, const Potential& V,
                                 const DualPotential* witness);

// Change-of-variables oracle for strictly monotone maps:
// int rho log rho = E_p[log p(X) - log T'(X)]. Refuses when T'(X_s) <= 0 at
// any sample point.
double entropy_change_of_variables(const PushforwardMap1D& map,
                                   const ParticleEnsemble& ensemble);

}  // namespace pfflow
