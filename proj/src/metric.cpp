#include "pfflow/metric.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <vector>

#include "pfflow/errors.hpp"

namespace pfflow {

namespace {
constexpr int kChunk = 4096;  // fixed-size chunks keep reductions deterministic
}

MetricTensor metric_1d(const PushforwardMap1D& map, const ParticleEnsemble& ensemble) {
  if (ensemble.provenance != Provenance::reference)
    throw Error("metric_1d: ensemble must be reference samples");
  if (ensemble.dimension() != 1) throw Error("metric_1d: requires d = 1");
  const int m = map.basis.size();
  const int n = ensemble.count();

  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(m, m);
  Eigen::MatrixXd chunk_block(kChunk, m);
  Eigen::VectorXd phi(m);
  int fill = 0;
  for (int s = 0; s < n; ++s) {
    map.basis.values(ensemble.points(s, 0),
                     std::span<double>(phi.data(), static_cast<size_t>(m)));
    chunk_block.row(fill++) = phi;
    if (fill == kChunk) {
      acc.selfadjointView<Eigen::Upper>().rankUpdate(chunk_block.transpose(), 1.0);
      fill = 0;
    }
  }
  if (fill > 0)
    acc.selfadjointView<Eigen::Upper>().rankUpdate(chunk_block.topRows(fill).transpose(), 1.0);

  MetricTensor G;
  G.entries = Eigen::MatrixXd(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      const double v = acc(i, j) / n;
      G.entries(i, j) = v;
      G.entries(j, i) = v;
    }
  G.sample_count = n;
  return G;
}

double default_ridge(const MetricTensor& G) {
  return 1e-8 * G.entries.trace() / G.size();
}

RegularizedSolve solve_regularized(const MetricTensor& G, const Eigen::VectorXd& rhs,
                                   double ridge) {
  if (ridge < 0.0) throw Error("solve_regularized: ridge must be >= 0");
  const int m = G.size();
  if (rhs.size() != m) throw Error("solve_regularized: rhs size mismatch");

  const double scale = G.entries.trace() / m;
  constexpr int kMaxEscalations = 8;

  double eps = ridge;
  for (int attempt = 0; attempt <= kMaxEscalations; ++attempt) {
    Eigen::MatrixXd A = G.entries;
    A.diagonal().array() += eps;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
    if (ldlt.info() == Eigen::Success) {
      Eigen::VectorXd u = ldlt.solve(rhs);
      const double resid = (A * u - rhs).norm();
      const double bound =
          1e-8 * std::max(rhs.norm(), u.norm() * (A.cwiseAbs().rowwise().sum().maxCoeff()));
      if (u.allFinite() && resid <= std::max(bound, 1e-300)) {
        return {std::move(u), eps, attempt};
      }
    }
    // escalate; a zero ridge restarts from a trace-scaled floor
    eps = (eps > 0.0) ? eps * 10.0 : 1e-14 * scale;
  }
  throw SingularMetricError("solve_regularized: ridge escalation cap exceeded");
}

double condition_number(const MetricTensor& G, double ridge) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G.entries,
                                                    Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff() + ridge;
  const double hi = es.eigenvalues().maxCoeff() + ridge;
  if (lo <= 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

}  // namespace pfflow
