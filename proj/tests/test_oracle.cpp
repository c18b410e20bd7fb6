#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "pfflow/errors.hpp"
#include "pfflow/oracle.hpp"

using namespace pfflow;

namespace {

GridDensity gaussian_grid(double mu, double var, double lo, double hi, int nodes) {
  return discretize_density(
      [&](double x) { return std::exp(-0.5 * (x - mu) * (x - mu) / var); }, lo, hi, nodes);
}

ParticleEnsemble points(std::vector<double> xs) {
  Eigen::MatrixXd m(xs.size(), 1);
  for (size_t i = 0; i < xs.size(); ++i) m(i, 0) = xs[i];
  return {std::move(m), Provenance::sde};
}

}  // namespace

TEST_CASE("discretize_density normalizes and validates") {
  const auto rho = gaussian_grid(0, 1, -6, 6, 1201);
  CHECK(rho.mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rho.mean() == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(rho.variance() == doctest::Approx(1.0).epsilon(1e-3));
  CHECK_THROWS_AS(discretize_density([](double) { return -1.0; }, -1, 1, 11), Error);
  CHECK_THROWS_AS(discretize_density([](double) { return 0.0; }, -1, 1, 11), Error);
}

TEST_CASE("fd_solve with no drift and no diffusion is the identity") {
  const auto rho0 = gaussian_grid(0, 1, -4, 4, 401);
  const Potential V = Potential::polynomial({0.0}, 0.0);
  const auto rho = fd_solve(rho0, V, 1e-3, 0.5);
  CHECK(rho.values == rho0.values);
}

TEST_CASE("fd_solve reproduces the OU variance curve") {
  const auto rho0 = gaussian_grid(0, 4, -9, 9, 901);
  const Potential V = Potential::quadratic1d(1.0, 0.0, 1.0);
  const double dt = 0.9 * fd_stable_dt(rho0, V);
  const auto rho = fd_solve(rho0, V, dt, 1.0);
  CHECK(rho.mass() == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(rho.variance() == doctest::Approx(1.0 + 3.0 * std::exp(-2.0)).epsilon(1e-3));
  CHECK(rho.values.minCoeff() >= 0.0);
}

TEST_CASE("fd_solve long-run double well converges to Gibbs") {
  const Potential V = Potential::double_well(0.25);
  const auto rho0 = gaussian_grid(0, 1, -3, 3, 2001);
  const double dt = 0.9 * fd_stable_dt(rho0, V);
  const auto rho = fd_solve(rho0, V, dt, 5.0);
  const auto gibbs = gibbs_density(V, -3, 3, 2001);
  CHECK(wasserstein1(rho, gibbs) <= 0.02);
  CHECK(std::abs(rho.mass() - 1.0) <= 1e-8);
}

TEST_CASE("fd_solve rejects an unstable dt up front") {
  const auto rho0 = gaussian_grid(0, 1, -3, 3, 501);
  const Potential V = Potential::double_well(0.25);
  CHECK_THROWS_AS(fd_solve(rho0, V, 2.0 * fd_stable_dt(rho0, V), 1.0), StabilityError);
}

TEST_CASE("one fd step barely moves the Gibbs density") {
  const Potential V = Potential::double_well(0.25);
  const auto gibbs = gibbs_density(V, -3, 3, 2001);
  const double dt = 0.9 * fd_stable_dt(gibbs, V);
  const auto moved = fd_solve(gibbs, V, dt, dt);
  CHECK(wasserstein1(moved, gibbs) <= 1e-4);
}

TEST_CASE("sde_simulate keeps particles immobile without drift or noise") {
  const Potential V = Potential::polynomial({0.0}, 0.0);
  const auto out = sde_simulate(
      64, V, [](NormalStream& s) { return s.next(); }, 0.01, 1.0, 5);
  // with beta = 0 and V' = 0 every particle sits at its initial draw
  for (int i = 0; i < 64; ++i) {
    NormalStream s(5, "sde", static_cast<std::uint64_t>(i));
    CHECK(out.points(i, 0) == s.next());
  }
  CHECK(out.provenance == Provenance::sde);
}

TEST_CASE("sde_simulate holds the OU stationary variance") {
  const Potential V = Potential::quadratic1d(1.0, 0.0, 1.0);
  const auto out = sde_simulate(
      10000, V, [](NormalStream& s) { return s.next(); }, 1e-3, 2.0, 11);
  const double mean = out.points.col(0).mean();
  const double var = (out.points.col(0).array() - mean).square().mean();
  CHECK(var >= 0.94);
  CHECK(var <= 1.06);
}

TEST_CASE("drift-only double well splits the mass onto the wells") {
  const Potential V = Potential::double_well(0.0);
  const int n = 10000;
  const auto out = sde_simulate(
      n, V, [](NormalStream& s) { return s.next(); }, 1e-3, 5.0, 13);
  int near = 0, left = 0;
  for (int i = 0; i < n; ++i) {
    const double y = out.points(i, 0);
    if (std::abs(std::abs(y) - 1.0) <= 0.2) ++near;
    if (y < 0) ++left;
  }
  CHECK(static_cast<double>(near) / n >= 0.95);
  CHECK(std::abs(static_cast<double>(left) / n - 0.5) <= 0.05);
}

TEST_CASE("sde_simulate is deterministic per seed") {
  const Potential V = Potential::double_well(0.25);
  const auto a = sde_simulate(100, V, [](NormalStream& s) { return s.next(); }, 1e-2, 1.0, 3);
  const auto b = sde_simulate(100, V, [](NormalStream& s) { return s.next(); }, 1e-2, 1.0, 3);
  CHECK(a.points == b.points);
}

TEST_CASE("gibbs_density") {
  SUBCASE("quadratic potential gives the Gaussian") {
    const Potential V = Potential::quadratic1d(1.0, 0.0, 1.0);
    const auto g = gibbs_density(V, -6, 6, 2001);
    double max_err = 0.0;
    for (int i = 0; i < g.nodes(); ++i) {
      const double x = g.node(i);
      const double want = std::exp(-0.5 * x * x) / std::sqrt(2 * std::numbers::pi);
      max_err = std::max(max_err, std::abs(g.values[i] - want));
    }
    CHECK(max_err <= 1e-4);
  }
  SUBCASE("double well is symmetric and bimodal at +-1") {
    const Potential V = Potential::double_well(0.25);
    const auto g = gibbs_density(V, -3, 3, 2001);
    for (int i = 0; i < g.nodes(); ++i)
      CHECK(g.values[i] == doctest::Approx(g.values[g.nodes() - 1 - i]).epsilon(1e-12));
    int argmax = 0;
    for (int i = 1; i <= g.nodes() / 2; ++i)
      if (g.values[i] > g.values[argmax]) argmax = i;
    CHECK(g.node(argmax) == doctest::Approx(-1.0).epsilon(0.01));
    CHECK(g.values[g.nodes() / 2] < 0.05 * g.values[argmax]);
  }
  SUBCASE("constant potential gives the uniform density") {
    const Potential V = Potential::polynomial({2.0}, 1.0);
    const auto g = gibbs_density(V, -3, 3, 601);
    // flat at 1/(nodes * dx) under the plain-sum normalization
    const double flat = 1.0 / (g.nodes() * g.dx());
    for (int i = 0; i < g.nodes(); ++i)
      CHECK(g.values[i] == doctest::Approx(flat).epsilon(1e-12));
    CHECK(g.mass() == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("beta = 0 is rejected") {
    CHECK_THROWS_AS(gibbs_density(Potential::double_well(0.0), -3, 3, 101), Error);
  }
}

TEST_CASE("wasserstein1 basics") {
  SUBCASE("identical inputs give zero") {
    const auto a = points({0.3, -1.2, 0.9, 2.0});
    CHECK(wasserstein1(a, a) == 0.0);
    const auto g = gaussian_grid(0, 1, -5, 5, 401);
    CHECK(wasserstein1(g, g) == 0.0);
  }
  SUBCASE("translation cost between point masses") {
    const auto zero = points({0.0, 0.0, 0.0});
    const auto at_c = points({2.5, 2.5, 2.5});
    CHECK(wasserstein1(zero, at_c) == doctest::Approx(2.5).epsilon(1e-14));
  }
  SUBCASE("translated Gaussians cost the shift") {
    const auto a = gaussian_grid(0, 1, -6, 8, 1401);
    const auto b = gaussian_grid(1.5, 1, -6, 8, 1401);
    CHECK(wasserstein1(a, b) == doctest::Approx(1.5).epsilon(2e-3));
  }
  SUBCASE("equal-size sample sets match the sorted-difference formula") {
    std::mt19937_64 gen(2);
    std::normal_distribution<double> normal;
    std::vector<double> xs(257), ys(257);
    for (auto& v : xs) v = normal(gen);
    for (auto& v : ys) v = 0.5 + 1.7 * normal(gen);
    const double w = wasserstein1(points(xs), points(ys));
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    double direct = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) direct += std::abs(xs[i] - ys[i]);
    direct /= xs.size();
    CHECK(w == doctest::Approx(direct).epsilon(1e-12));
  }
  SUBCASE("metric properties on random inputs") {
    std::mt19937_64 gen(9);
    std::normal_distribution<double> normal;
    const auto draw = [&](double shift, double scale, int n) {
      std::vector<double> xs(n);
      for (auto& v : xs) v = shift + scale * normal(gen);
      return points(xs);
    };
    for (int rep = 0; rep < 10; ++rep) {
      const auto a = draw(normal(gen), 1.0, 101);
      const auto b = draw(normal(gen), 0.7, 83);
      const auto c = draw(normal(gen), 1.4, 57);
      const double ab = wasserstein1(a, b);
      const double ba = wasserstein1(b, a);
      CHECK(ab == ba);
      CHECK(wasserstein1(a, c) <= ab + wasserstein1(b, c) + 1e-12);
      CHECK(ab >= 0.0);
    }
  }
  SUBCASE("empty input is rejected") {
    Eigen::MatrixXd empty(0, 1);
    ParticleEnsemble e{empty, Provenance::sde};
    CHECK_THROWS_AS(wasserstein1(e, e), Error);
  }
}

TEST_CASE("fd and sde oracles agree on the double well") {
  const Potential V = Potential::double_well(0.25);
  const auto rho0 = gaussian_grid(0, 1, -3, 3, 1001);
  const double dt = 0.9 * fd_stable_dt(rho0, V);
  const auto rho1 = fd_solve(rho0, V, dt, 1.0);
  const auto particles = sde_simulate(
      8000, V, [](NormalStream& s) { return s.next(); }, 1e-3, 1.0, 17);
  CHECK(wasserstein1(particles, rho1) <= 0.08);
}
