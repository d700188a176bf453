#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "tvprox/error.hpp"
#include "tvprox/tv_functional.hpp"

using namespace tvprox;

TEST_CASE("mode names") {
  CHECK(parse_tv_mode("aniso") == TvMode::anisotropic);
  CHECK(parse_tv_mode("iso") == TvMode::isotropic);
  CHECK(to_string(TvMode::isotropic) == "iso");
  CHECK_THROWS(parse_tv_mode("l2"));
}

TEST_CASE("tv of small signals") {
  for (TvMode m : {TvMode::anisotropic, TvMode::isotropic}) {
    CHECK(tv(NdSignal({4, 5}, 3.0), m) == 0.0);
    CHECK(tv(NdSignal({4}, {4, 0, 0, 0}), m) == 8.0);
  }
  const NdSignal x({2, 2}, {1, 0, 0, 0});
  CHECK(tv(x, TvMode::anisotropic) == 4.0);
  CHECK(tv(x, TvMode::isotropic) == doctest::Approx(2.0 + std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("tv matches the definition on random signals") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t d = 1 + trial % 3;
    const auto x = testing::random_signal(testing::random_shape(d, rng, 2, 8), rng);
    CHECK(tv(x, TvMode::anisotropic) == doctest::Approx(testing::naive_tv(x, false)).epsilon(1e-12));
    CHECK(tv(x, TvMode::isotropic) == doctest::Approx(testing::naive_tv(x, true)).epsilon(1e-12));
    if (d == 1)
      CHECK(tv(x, TvMode::anisotropic, Boundary::free) ==
            doctest::Approx(testing::naive_tv_free_1d(x)).epsilon(1e-12));
  }
}

TEST_CASE("norm equivalence and homogeneity") {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 1 + trial % 3;
    const auto x = testing::random_signal(testing::random_shape(d, rng, 2, 8), rng);
    const double iso = tv(x, TvMode::isotropic), an = tv(x, TvMode::anisotropic);
    CHECK(iso <= an * (1 + 1e-14));
    CHECK(an <= std::sqrt(static_cast<double>(d)) * iso * (1 + 1e-14));
    const double a = testing::uniform(rng, -5, 5);
    for (TvMode m : {TvMode::anisotropic, TvMode::isotropic})
      CHECK(std::fabs(tv(a * x, m) - std::fabs(a) * tv(x, m)) <= 1e-12 * std::fabs(a) * tv(x, m));
  }
}

TEST_CASE("lifted TV agrees with TV on frame coefficients") {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t d = 1 + trial % 3;
    const auto z = testing::random_signal(testing::random_shape(d, rng, 2, 10), rng);
    const auto u = w_forward(z);
    for (TvMode m : {TvMode::anisotropic, TvMode::isotropic})
      CHECK(h_hat(u, m) == doctest::Approx(tv(z, m)).epsilon(1e-12));
  }
}

TEST_CASE("lifted TV arithmetic") {
  CoeffStack u({2, 2});
  CHECK(h_hat(u, TvMode::isotropic) == 0.0);
  u.dif(0)[0] = 3.0;
  u.dif(1)[0] = 4.0;
  u.avg(0)[2] = 100.0;  // averaging coefficients do not count
  CHECK(h_hat(u, TvMode::isotropic) == doctest::Approx(2 * std::sqrt(2.0) * 5));
  CHECK(h_hat(u, TvMode::anisotropic) == doctest::Approx(2 * std::sqrt(2.0) * 7));
}

namespace {

CoeffStack random_stack(const NdSignal::Shape& shape, std::mt19937_64& rng) {
  CoeffStack u(shape);
  std::normal_distribution<double> g;
  std::bernoulli_distribution zero(0.2);
  for (double& v : u.values()) v = zero(rng) ? 0.0 : g(rng);
  return u;
}

}  // namespace

TEST_CASE("canonical subgradient") {
  for (TvMode m : {TvMode::anisotropic, TvMode::isotropic}) {
    const auto g = h_hat_subgradient(CoeffStack({3, 3}), m);
    for (double v : g.values()) CHECK(v == 0.0);
  }

  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t d = 1 + trial % 3;
    const auto shape = testing::random_shape(d, rng, 2, 6);
    const auto u = random_stack(shape, rng);
    const auto w = random_stack(shape, rng);
    const double n = static_cast<double>(u.block_size());
    for (TvMode m : {TvMode::anisotropic, TvMode::isotropic}) {
      const auto g = h_hat_subgradient(u, m);
      for (std::size_t j = 0; j < d; ++j)
        for (double v : g.avg(j)) CHECK(v == 0.0);
      // subgradient inequality
      const double lhs = h_hat(w, m);
      const double rhs = h_hat(u, m) + dot(g, w - u);
      CHECK(lhs >= rhs - 1e-10 * (1.0 + std::fabs(lhs)));
      // norm bound
      CHECK(l2_norm(g) <= 2.0 * static_cast<double>(d) * std::sqrt(n) + 1e-10);
    }
  }
}
