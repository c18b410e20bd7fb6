#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "pfflow/basis.hpp"

namespace pfflow {

enum class Provenance { reference, pushforward, sde };

// n points in R^d, row per particle.
struct ParticleEnsemble {
  Eigen::MatrixXd points;
  Provenance provenance = Provenance::reference;

  int count() const { return static_cast<int>(points.rows()); }
  int dimension() const { return static_cast<int>(points.cols()); }
};

// Reference measure p = N(0, I_d). Sampling is deterministic in
// (seed, stream_index, n); see rng.hpp for the stream-splitting rule.
struct ReferenceMeasure {
  int dimension = 1;
  std::uint64_t seed = 0;
};

ParticleEnsemble sample_reference(const ReferenceMeasure& p, int n,
                                  std::uint64_t stream_index = 0);

// Pointwise image {T_theta(X_i)} of a reference ensemble.
ParticleEnsemble pushforward_samples(const PushforwardMap1D& map,
                                     const ParticleEnsemble& ensemble);

}  // namespace pfflow
