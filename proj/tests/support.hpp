#pragma once

// Random inputs and independent reference implementations for the tests.
// The references work on explicit multi-indices and plain loops so that they
// share no code with the library's strided kernels.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "tvprox/nd_signal.hpp"

namespace testing {

using tvprox::NdSignal;

inline NdSignal random_signal(const NdSignal::Shape& shape, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  NdSignal x(shape);
  for (double& v : x.values()) v = g(rng);
  return x;
}

inline NdSignal::Shape random_shape(std::size_t d, std::mt19937_64& rng, std::size_t lo = 2,
                                    std::size_t hi = 16) {
  std::uniform_int_distribution<std::size_t> e(lo, hi);
  NdSignal::Shape s(d);
  for (auto& v : s) v = e(rng);
  return s;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Log-uniform in [lo, hi].
inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

inline std::vector<std::size_t> unravel(std::size_t flat, const NdSignal::Shape& shape) {
  std::vector<std::size_t> idx(shape.size());
  for (std::size_t j = shape.size(); j-- > 0;) {
    idx[j] = flat % shape[j];
    flat /= shape[j];
  }
  return idx;
}

inline std::size_t ravel(const std::vector<std::size_t>& idx, const NdSignal::Shape& shape) {
  std::size_t flat = 0;
  for (std::size_t j = 0; j < shape.size(); ++j) flat = flat * shape[j] + idx[j];
  return flat;
}

/// Flat index of the neighbour at offset `step` (+1 or -1) along `axis`, wrapping.
inline std::size_t neighbour(std::size_t flat, const NdSignal::Shape& shape, std::size_t axis, int step) {
  auto idx = unravel(flat, shape);
  const long wrapped = static_cast<long>(idx[axis]) + static_cast<long>(shape[axis]) + step;
  idx[axis] = static_cast<std::size_t>(wrapped) % shape[axis];
  return ravel(idx, shape);
}

inline NdSignal naive_avg(const NdSignal& x, std::size_t axis) {
  NdSignal out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + x[neighbour(i, x.shape(), axis, +1)];
  return out;
}

inline NdSignal naive_diff(const NdSignal& x, std::size_t axis) {
  NdSignal out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - x[neighbour(i, x.shape(), axis, +1)];
  return out;
}

/// Circular TV straight from the definition.
inline double naive_tv(const NdSignal& x, bool isotropic) {
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double sq = 0.0, ab = 0.0;
    for (std::size_t j = 0; j < x.dims(); ++j) {
      const double g = x[i] - x[neighbour(i, x.shape(), j, +1)];
      sq += g * g;
      ab += std::fabs(g);
    }
    total += isotropic ? std::sqrt(sq) : ab;
  }
  return total;
}

/// 1D TV with free boundary.
inline double naive_tv_free_1d(const NdSignal& x) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) total += std::fabs(x[i + 1] - x[i]);
  return total;
}

/// Pairwise (recursive halving) summation of a*b.
inline double pairwise_dot(const double* a, const double* b, std::size_t n) {
  if (n == 0) return 0.0;
  if (n == 1) return a[0] * b[0];
  const std::size_t h = n / 2;
  return pairwise_dot(a, b, h) + pairwise_dot(a + h, b + h, n - h);
}

}  // namespace testing
