#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "tvprox/exact_prox.hpp"
#include "tvprox/shrinkage.hpp"

using namespace tvprox;

namespace {

// Minimizes 1/2 (x0 - a)^2 + 1/2 (x1 - b)^2 + tau * c * |x0 - x1| by golden
// section on the difference; the mean is preserved by symmetry.
std::pair<double, double> two_point_prox(double a, double b, double tau, double c) {
  const double m = 0.5 * (a + b);
  auto f = [&](double delta) {
    const double x0 = m + delta / 2, x1 = m - delta / 2;
    return 0.5 * (x0 - a) * (x0 - a) + 0.5 * (x1 - b) * (x1 - b) + tau * c * std::fabs(delta);
  };
  double lo = -std::fabs(a - b) - 1, hi = std::fabs(a - b) + 1;
  const double r = (std::sqrt(5.0) - 1) / 2;
  while (hi - lo > 1e-12) {
    const double p = hi - r * (hi - lo), q = lo + r * (hi - lo);
    if (f(p) < f(q)) hi = q; else lo = p;
  }
  const double delta = 0.5 * (lo + hi);
  return {m + delta / 2, m - delta / 2};
}

}  // namespace

TEST_CASE("oracle configuration") {
  CHECK_THROWS(OracleConfig{0, 1e-10}.validate());
  CHECK_THROWS(OracleConfig{10, 0.0}.validate());
  CHECK_NOTHROW(OracleConfig{}.validate());
}

TEST_CASE("constants are returned unchanged") {
  for (TvMode m : {TvMode::anisotropic, TvMode::isotropic}) {
    const NdSignal c({6, 7}, 2.0);
    const auto r = fpg_solve(c, 5.0, OracleConfig{500, 1e-10, m});
    CHECK(r.converged);
    CHECK(max_abs_diff(r.x, c) <= 1e-14);
  }
}

TEST_CASE("two-sample signals") {
  // Circular differences count the single jump twice.
  const auto r = fpg_solve(NdSignal({2}, {4, 0}), 0.5, OracleConfig{10000, 1e-14});
  CHECK(r.x[0] == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-9));
  const auto [a, b] = two_point_prox(4, 0, 0.5, 2.0);
  CHECK(std::fabs(r.x[0] - a) <= 1e-6);
  CHECK(std::fabs(r.x[1] - b) <= 1e-6);

  const auto t = tautstring_prox_1d(NdSignal({2}, {0, 4}), 0.5);
  CHECK(t[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(t[1] == doctest::Approx(3.5).epsilon(1e-14));
  const auto [c, d] = two_point_prox(0, 4, 0.5, 1.0);
  CHECK(std::fabs(t[0] - c) <= 1e-6);
  CHECK(std::fabs(t[1] - d) <= 1e-6);
}

TEST_CASE("taut string flattens for large tau") {
  std::mt19937_64 rng(51);
  const auto z = testing::random_signal({40}, rng);
  const auto x = tautstring_prox_1d(z, 1e6);
  // Partial sums carry tau-sized terms, so expect about tau * eps of cancellation.
  for (double v : x.values()) CHECK(std::fabs(v - mean(z)) <= 1e-8);
  CHECK_THROWS(tautstring_prox_1d(NdSignal({3, 3}), 1.0));
  CHECK_THROWS(tautstring_prox_1d(z, 0.0));
}

TEST_CASE("taut string matches the free-boundary dual solver") {
  std::mt19937_64 rng(52);
  OracleConfig cfg{200000, 1e-13};
  cfg.boundary = Boundary::free;
  for (int trial = 0; trial < 25; ++trial) {
    const auto z = testing::random_signal({64}, rng, testing::log_uniform(rng, 0.2, 5));
    const double tau = testing::log_uniform(rng, 0.01, 3);
    CHECK(max_abs_diff(fpg_prox(z, tau, cfg), tautstring_prox_1d(z, tau)) <= 1e-6);
  }
}

TEST_CASE("taut string is optimal against the iterative solver") {
  std::mt19937_64 rng(53);
  OracleConfig cfg{200000, 1e-12};
  cfg.boundary = Boundary::free;
  for (int trial = 0; trial < 20; ++trial) {
    const auto z = testing::random_signal({32}, rng);
    const double tau = testing::log_uniform(rng, 0.05, 2);
    const double f_taut = prox_objective(z, tautstring_prox_1d(z, tau), tau, TvMode::anisotropic, Boundary::free);
    const double f_fpg = prox_objective(z, fpg_prox(z, tau, cfg), tau, TvMode::anisotropic, Boundary::free);
    CHECK(f_taut <= f_fpg + 1e-10);
  }
}

TEST_CASE("optimality residual") {
  std::mt19937_64 rng(54);
  const auto z = testing::random_signal({12, 12}, rng);
  // Tight solve: anisotropic duals are pinned exactly by the signs of x.
  const auto x = fpg_prox(z, 0.1, OracleConfig{100000, 1e-12});
  CHECK(prox_residual(z, x, 0.1, TvMode::anisotropic) <= 1e-10);
  CHECK(prox_residual(z, z, 0.1, TvMode::anisotropic) > 0.0);
  const NdSignal c({5, 5}, 1.0);
  CHECK(prox_residual(c, c, 0.3, TvMode::isotropic) == 0.0);

  // Isotropic: the residual tracks the square root of the duality gap.
  const auto xi = fpg_prox(z, 0.1, OracleConfig{100000, 1e-12, TvMode::isotropic});
  CHECK(prox_residual(z, xi, 0.1, TvMode::isotropic) <= 1e-6);
  CHECK(prox_residual(z, z, 0.1, TvMode::isotropic) > 0.0);
  // The approximate prox is not the exact one.
  const auto s = approx_prox(z, ProxParams(0.1, TvMode::isotropic));
  CHECK(prox_residual(z, s, 0.1, TvMode::isotropic) > 1e-3);
}

TEST_CASE("solver reports its state") {
  std::mt19937_64 rng(55);
  const auto z = testing::random_signal({16, 16}, rng);
  const auto capped = fpg_solve(z, 1.0, OracleConfig{3, 1e-14});
  CHECK_FALSE(capped.converged);
  CHECK(capped.iterations == 3);
  const auto full = fpg_solve(z, 1.0, OracleConfig{100000, 1e-10});
  CHECK(full.converged);
  CHECK(full.gap >= 0.0);
  for (double p : full.dual.values()) CHECK(std::fabs(p) <= 1.0);

  // A warm start from the solution converges at once.
  const auto warm = fpg_solve(z, 1.0, OracleConfig{100000, 1e-10}, &full.dual);
  CHECK(warm.iterations <= 5);
  CHECK(max_abs_diff(warm.x, full.x) <= 1e-6);
  GradientField wrong({4, 4});
  CHECK_THROWS(fpg_solve(z, 1.0, OracleConfig{}, &wrong));
}

TEST_CASE("objective decreases from the starting point") {
  std::mt19937_64 rng(56);
  for (TvMode m : {TvMode::anisotropic, TvMode::isotropic}) {
    for (int trial = 0; trial < 10; ++trial) {
      const auto z = testing::random_signal({10, 9}, rng);
      const double tau = testing::log_uniform(rng, 1e-2, 2);
      const auto x = fpg_prox(z, tau, OracleConfig{500, 1e-10, m});
      CHECK(prox_objective(z, x, tau, m) <= prox_objective(z, z, tau, m));
    }
  }
}

TEST_CASE("exact prox is firmly nonexpansive and close to identity for small tau") {
  std::mt19937_64 rng(57);
  for (TvMode m : {TvMode::anisotropic, TvMode::isotropic}) {
    const OracleConfig cfg{20000, 1e-12, m};
    for (int trial = 0; trial < 10; ++trial) {
      const auto z1 = testing::random_signal({8, 8}, rng), z2 = testing::random_signal({8, 8}, rng);
      const double tau = testing::log_uniform(rng, 1e-2, 1);
      const auto p1 = fpg_prox(z1, tau, cfg), p2 = fpg_prox(z2, tau, cfg);
      const double lhs = std::pow(l2_norm(p1 - p2), 2);
      CHECK(lhs <= dot(z1 - z2, p1 - p2) + 1e-8);

      const double small = 1e-4;
      CHECK(l2_norm(fpg_prox(z1, small, cfg) - z1) <= small * 4 * 2 * 8);
    }
  }
}

TEST_CASE("3-D signals") {
  std::mt19937_64 rng(58);
  const auto z = testing::random_signal({5, 6, 4}, rng);
  for (TvMode m : {TvMode::anisotropic, TvMode::isotropic}) {
    const auto r = fpg_solve(z, 0.05, OracleConfig{20000, 1e-10, m});
    CHECK(r.converged);
    const double bound = 4 * 0.05 * 3 * std::sqrt(static_cast<double>(z.size()));
    CHECK(l2_norm(r.x - approx_prox(z, ProxParams(0.05, m))) <= bound);
  }
}
