#pragma once

#include <Eigen/Core>

#include "pfflow/basis.hpp"
#include "pfflow/sampling.hpp"

namespace pfflow {

// Pullback Wasserstein metric on parameter space, 1D explicit form:
// G_ij = E_{X~p}[phi_i(X) phi_j(X)], estimated over the given ensemble.
struct MetricTensor {
  Eigen::MatrixXd entries;
  int sample_count = 0;

  int size() const { return static_cast<int>(entries.rows()); }
};

// Monte-Carlo estimate of G over reference samples. Exactly symmetric as
// stored (upper triangle computed once, mirrored); independent of theta for
// theta-linear maps, so only the basis of `map` matters.
MetricTensor metric_1d(const PushforwardMap1D& map, const ParticleEnsemble& ensemble);

// Default ridge: 1e-8 * trace(G) / m.
double default_ridge(const MetricTensor& G);

struct RegularizedSolve {
  Eigen::VectorXd solution;
  double ridge_used = 0.0;
  int escalations = 0;
};

// Solves (G + eps I) u = g by LDLT. If the factorization fails or the
// residual is not small, eps escalates by x10 (from a trace-scaled floor when
// eps == 0) up to 8 retries; exhausting them raises SingularMetricError.
RegularizedSolve solve_regularized(const MetricTensor& G, const Eigen::VectorXd& rhs,
                                   double ridge);

// cond_2(G + ridge I) from the symmetric eigenvalues.
double condition_number(const MetricTensor& G, double ridge = 0.0);

}  // namespace pfflow
