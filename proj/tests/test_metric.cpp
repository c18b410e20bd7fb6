#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <random>

#include "pfflow/errors.hpp"
#include "pfflow/metric.hpp"
#include "pfflow/sampling.hpp"

using namespace pfflow;

namespace {

MetricTensor from_matrix(Eigen::MatrixXd m) {
  return {std::move(m), 1};
}

}  // namespace

TEST_CASE("single constant basis gives G = [1] exactly") {
  const auto ens = sample_reference({1, 3}, 5000);
  BasisSet b(BasisKind::sinusoidal, 1, 2.0);
  const auto G = metric_1d({b, Eigen::VectorXd::Zero(1)}, ens);
  CHECK(G.entries(0, 0) == 1.0);
  CHECK(G.sample_count == 5000);
}

TEST_CASE("orthonormal basis converges to the identity") {
  const auto ens = sample_reference({1, 21}, 1000000);
  BasisSet b(BasisKind::sinusoidal, 2, 3.0);
  const auto G = metric_1d({b, Eigen::VectorXd::Zero(2)}, ens);
  const Eigen::MatrixXd err = G.entries - Eigen::MatrixXd::Identity(2, 2);
  CHECK(err.cwiseAbs().maxCoeff() <= 5e-3);
}

TEST_CASE("monomial basis matches the Gaussian moment matrix") {
  const auto ens = sample_reference({1, 2024}, 1000000);
  BasisSet b(BasisKind::polynomial, 3, 3.0);
  const auto G = metric_1d({b, Eigen::VectorXd::Zero(3)}, ens);
  Eigen::MatrixXd want(3, 3);
  want << 1, 0, 1, 0, 1, 0, 1, 0, 3;
  CHECK((G.entries - want).cwiseAbs().maxCoeff() <= 1e-2);
}

TEST_CASE("metric is exactly symmetric, PSD and theta-independent") {
  const auto ens = sample_reference({1, 8}, 20000);
  BasisSet b(BasisKind::hat, 7, 2.0);
  Eigen::VectorXd t1 = Eigen::VectorXd::Zero(7);
  Eigen::VectorXd t2 = Eigen::VectorXd::Constant(7, 1.7);
  const auto G1 = metric_1d({b, t1}, ens);
  const auto G2 = metric_1d({b, t2}, ens);
  CHECK(G1.entries == G2.entries);

  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) CHECK(G1.entries(i, j) == G1.entries(j, i));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G1.entries, Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().minCoeff() >= -1e-10);
}

TEST_CASE("quadratic form agrees with the per-sample sum of squares") {
  const int n = 5000;
  const auto ens = sample_reference({1, 77}, n);
  std::mt19937_64 gen(19);
  std::normal_distribution<double> normal;
  for (BasisKind kind : {BasisKind::sinusoidal, BasisKind::hat, BasisKind::polynomial}) {
    BasisSet b(kind, 5, 2.5);
    const auto G = metric_1d({b, Eigen::VectorXd::Zero(5)}, ens);
    for (int rep = 0; rep < 10; ++rep) {
      Eigen::VectorXd xi(5);
      for (int k = 0; k < 5; ++k) xi[k] = normal(gen);
      const double quad = xi.dot(G.entries * xi);
      double direct = 0.0;
      for (int s = 0; s < n; ++s) {
        const double proj = xi.dot(b.values(ens.points(s, 0)));
        direct += proj * proj;
      }
      direct /= n;
      CHECK(quad == doctest::Approx(direct).epsilon(1e-10));
      CHECK(quad >= -1e-12);
    }
  }
}

TEST_CASE("solve_regularized identity") {
  Eigen::VectorXd g(2);
  g << 3, -1;
  const auto r = solve_regularized(from_matrix(Eigen::MatrixXd::Identity(2, 2)), g, 0.0);
  CHECK(r.solution[0] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(r.solution[1] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(r.ridge_used == 0.0);
}

TEST_CASE("solve_regularized pseudo-inverse limit") {
  Eigen::MatrixXd G(2, 2);
  G << 2, 0, 0, 0;
  Eigen::VectorXd g(2);
  g << 2, 0;
  const auto r = solve_regularized(from_matrix(G), g, 1e-8);
  CHECK(r.solution[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.solution[1] == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("solve_regularized rejects the zero metric") {
  Eigen::VectorXd g(2);
  g << 1, 1;
  CHECK_THROWS_AS(solve_regularized(from_matrix(Eigen::MatrixXd::Zero(2, 2)), g, 0.0),
                  SingularMetricError);
}

TEST_CASE("solve_regularized escalates on a singular metric with zero ridge") {
  Eigen::MatrixXd G(2, 2);
  G << 1, 1, 1, 1;  // rank one
  Eigen::VectorXd g(2);
  g << 1, 0;  // not in the range
  const auto r = solve_regularized(from_matrix(G), g, 0.0);
  CHECK(r.ridge_used > 0.0);
  CHECK(r.escalations > 0);
  CHECK(((G + r.ridge_used * Eigen::MatrixXd::Identity(2, 2)) * r.solution - g).norm() <=
        1e-6);
}

TEST_CASE("default ridge is trace-scaled") {
  Eigen::MatrixXd G(2, 2);
  G << 3, 0, 0, 1;
  CHECK(default_ridge(from_matrix(G)) == doctest::Approx(1e-8 * 2.0));
}

TEST_CASE("condition number of the regularized metric") {
  Eigen::MatrixXd G(2, 2);
  G << 4, 0, 0, 1;
  CHECK(condition_number(from_matrix(G), 0.0) == doctest::Approx(4.0));
  CHECK(condition_number(from_matrix(Eigen::MatrixXd::Zero(2, 2)), 0.0) ==
        std::numeric_limits<double>::infinity());
}
