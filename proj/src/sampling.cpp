#include "pfflow/sampling.hpp"

#include <cmath>

#include "pfflow/errors.hpp"
#include "pfflow/rng.hpp"

namespace pfflow {

ParticleEnsemble sample_reference(const ReferenceMeasure& p, int n,
                                  std::uint64_t stream_index) {
  if (n <= 0) throw Error("sample_reference: n must be positive");
  if (p.dimension <= 0) throw Error("sample_reference: dimension must be positive");
  NormalStream stream(p.seed, "reference", stream_index);
  Eigen::MatrixXd points(n, p.dimension);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p.dimension; ++j) points(i, j) = stream.next();
  return {std::move(points), Provenance::reference};
}

ParticleEnsemble pushforward_samples(const PushforwardMap1D& map,
                                     const ParticleEnsemble& ensemble) {
  if (ensemble.provenance != Provenance::reference)
    throw Error("pushforward_samples: ensemble must be reference samples");
  if (ensemble.dimension() != 1)
    throw Error("pushforward_samples: 1D map needs a 1D ensemble");
  const int n = ensemble.count();
  Eigen::MatrixXd out(n, 1);
  for (int i = 0; i < n; ++i) {
    const double y = map.value(ensemble.points(i, 0));
    if (!std::isfinite(y)) throw Error("pushforward_samples: non-finite image point");
    out(i, 0) = y;
  }
  return {std::move(out), Provenance::pushforward};
}

}  // namespace pfflow
