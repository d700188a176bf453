#include "kernels_impl.hpp"

#include <algorithm>
#include <cmath>

namespace tvprox::kernels::detail {
namespace {

// Reductions keep four interleaved partial sums so the AVX2 lanes can
// reproduce the same rounding sequence.
template <class F>
double lane_reduce(std::size_t n, F term) {
  double s[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s[0] += term(i);
    s[1] += term(i + 1);
    s[2] += term(i + 2);
    s[3] += term(i + 3);
  }
  for (std::size_t k = 0; i + k < n; ++k) s[k] += term(i + k);
  return (s[0] + s[1]) + (s[2] + s[3]);
}

double dot(const double* a, const double* b, std::size_t n) {
  return lane_reduce(n, [&](std::size_t i) { return a[i] * b[i]; });
}

double sum(const double* a, std::size_t n) {
  return lane_reduce(n, [&](std::size_t i) { return a[i]; });
}

double abs_sum(const double* a, std::size_t n) {
  return lane_reduce(n, [&](std::size_t i) { return std::fabs(a[i]); });
}

double group_sq(const double* const* blocks, std::size_t d, std::size_t i) {
  double sq = 0.0;
  for (std::size_t j = 0; j < d; ++j) sq += blocks[j][i] * blocks[j][i];
  return sq;
}

double group_norm_sum(const double* const* blocks, std::size_t d, std::size_t n) {
  return lane_reduce(n, [&](std::size_t i) { return std::sqrt(group_sq(blocks, d, i)); });
}

void combine(const double* a, const double* b, double* out, std::size_t n, double scale,
             double sign) {
  for (std::size_t i = 0; i < n; ++i) out[i] = scale * (a[i] + sign * b[i]);
}

void accumulate_haar_adjoint(const double* avg, const double* dif, const double* avg_prev,
                             const double* dif_prev, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] += (avg[i] + dif[i]) + (avg_prev[i] - dif_prev[i]);
}

void accumulate_diff_adjoint(const double* t, const double* t_prev, double* out, std::size_t n,
                             double scale) {
  for (std::size_t i = 0; i < n; ++i) out[i] += scale * (t[i] - t_prev[i]);
}

void axpby(double a, const double* x, double b, const double* y, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

void soft_threshold(double* u, std::size_t n, double lambda) {
  for (std::size_t i = 0; i < n; ++i) {
    const double t = u[i];
    double r = 0.0;
    if (t > lambda) r = t - lambda;
    if (t < -lambda) r = t + lambda;
    u[i] = r;
  }
}

void group_soft_threshold(double* const* blocks, std::size_t d, std::size_t n, double lambda) {
  for (std::size_t i = 0; i < n; ++i) {
    double sq = 0.0;
    for (std::size_t j = 0; j < d; ++j) sq += blocks[j][i] * blocks[j][i];
    const double nrm = std::sqrt(sq);
    const double f = nrm > lambda ? (nrm - lambda) / nrm : 0.0;
    for (std::size_t j = 0; j < d; ++j) blocks[j][i] *= f;
  }
}

void clamp_unit(double* p, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) p[i] = std::min(std::max(p[i], -1.0), 1.0);
}

void project_unit_groups(double* const* blocks, std::size_t d, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double sq = 0.0;
    for (std::size_t j = 0; j < d; ++j) sq += blocks[j][i] * blocks[j][i];
    const double nrm = std::sqrt(sq);
    const double div = nrm > 1.0 ? nrm : 1.0;
    for (std::size_t j = 0; j < d; ++j) blocks[j][i] /= div;
  }
}

}  // namespace

const Table& scalar_table() {
  static const Table table{
      "scalar",
      &dot,
      &sum,
      &abs_sum,
      &group_norm_sum,
      &combine,
      &accumulate_haar_adjoint,
      &accumulate_diff_adjoint,
      &axpby,
      &soft_threshold,
      &group_soft_threshold,
      &clamp_unit,
      &project_unit_groups,
  };
  return table;
}

}  // namespace tvprox::kernels::detail
