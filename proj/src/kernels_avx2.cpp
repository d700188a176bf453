#include "kernels_impl.hpp"

#include <immintrin.h>

#include <cmath>

namespace tvprox::kernels::detail {
namespace {

constexpr std::size_t kWidth = 4;

inline __m256d abs_pd(__m256d v) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v); }

// Lane k of the accumulator holds the partial sum of elements i with i % 4 == k,
// matching the scalar reference; the tail is folded in element by element.
inline double finish_lanes(__m256d acc, const double* tail_terms, std::size_t tail) {
  alignas(32) double s[4];
  _mm256_store_pd(s, acc);
  for (std::size_t k = 0; k < tail; ++k) s[k] += tail_terms[k];
  return (s[0] + s[1]) + (s[2] + s[3]);
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth)
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  double tail[4];
  const std::size_t rem = n - i;
  for (std::size_t k = 0; k < rem; ++k) tail[k] = a[i + k] * b[i + k];
  return finish_lanes(acc, tail, rem);
}

double sum(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
  double tail[4];
  const std::size_t rem = n - i;
  for (std::size_t k = 0; k < rem; ++k) tail[k] = a[i + k];
  return finish_lanes(acc, tail, rem);
}

double abs_sum(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) acc = _mm256_add_pd(acc, abs_pd(_mm256_loadu_pd(a + i)));
  double tail[4];
  const std::size_t rem = n - i;
  for (std::size_t k = 0; k < rem; ++k) tail[k] = std::fabs(a[i + k]);
  return finish_lanes(acc, tail, rem);
}

inline __m256d group_sq(const double* const* blocks, std::size_t d, std::size_t i) {
  __m256d sq = _mm256_setzero_pd();
  for (std::size_t j = 0; j < d; ++j) {
    const __m256d v = _mm256_loadu_pd(blocks[j] + i);
    sq = _mm256_add_pd(sq, _mm256_mul_pd(v, v));
  }
  return sq;
}

inline double group_sq_scalar(const double* const* blocks, std::size_t d, std::size_t i) {
  double sq = 0.0;
  for (std::size_t j = 0; j < d; ++j) sq += blocks[j][i] * blocks[j][i];
  return sq;
}

double group_norm_sum(const double* const* blocks, std::size_t d, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth)
    acc = _mm256_add_pd(acc, _mm256_sqrt_pd(group_sq(blocks, d, i)));
  double tail[4];
  const std::size_t rem = n - i;
  for (std::size_t k = 0; k < rem; ++k) tail[k] = std::sqrt(group_sq_scalar(blocks, d, i + k));
  return finish_lanes(acc, tail, rem);
}

void combine(const double* a, const double* b, double* out, std::size_t n, double scale,
             double sign) {
  const __m256d vs = _mm256_set1_pd(scale);
  const __m256d vg = _mm256_set1_pd(sign);
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) {
    const __m256d t =
        _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_mul_pd(vg, _mm256_loadu_pd(b + i)));
    _mm256_storeu_pd(out + i, _mm256_mul_pd(vs, t));
  }
  for (; i < n; ++i) out[i] = scale * (a[i] + sign * b[i]);
}

void accumulate_haar_adjoint(const double* avg, const double* dif, const double* avg_prev,
                             const double* dif_prev, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) {
    const __m256d cur = _mm256_add_pd(_mm256_loadu_pd(avg + i), _mm256_loadu_pd(dif + i));
    const __m256d prev =
        _mm256_sub_pd(_mm256_loadu_pd(avg_prev + i), _mm256_loadu_pd(dif_prev + i));
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(out + i), _mm256_add_pd(cur, prev)));
  }
  for (; i < n; ++i) out[i] += (avg[i] + dif[i]) + (avg_prev[i] - dif_prev[i]);
}

void accumulate_diff_adjoint(const double* t, const double* t_prev, double* out, std::size_t n,
                             double scale) {
  const __m256d vs = _mm256_set1_pd(scale);
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) {
    const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(t + i), _mm256_loadu_pd(t_prev + i));
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(out + i), _mm256_mul_pd(vs, diff)));
  }
  for (; i < n; ++i) out[i] += scale * (t[i] - t_prev[i]);
}

void axpby(double a, const double* x, double b, const double* y, double* out, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) {
    const __m256d t = _mm256_add_pd(_mm256_mul_pd(va, _mm256_loadu_pd(x + i)),
                                    _mm256_mul_pd(vb, _mm256_loadu_pd(y + i)));
    _mm256_storeu_pd(out + i, t);
  }
  for (; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

void soft_threshold(double* u, std::size_t n, double lambda) {
  const __m256d lam = _mm256_set1_pd(lambda);
  const __m256d neg_lam = _mm256_set1_pd(-lambda);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) {
    const __m256d t = _mm256_loadu_pd(u + i);
    const __m256d above = _mm256_cmp_pd(t, lam, _CMP_GT_OQ);
    const __m256d below = _mm256_cmp_pd(t, neg_lam, _CMP_LT_OQ);
    __m256d r = _mm256_blendv_pd(zero, _mm256_sub_pd(t, lam), above);
    r = _mm256_blendv_pd(r, _mm256_add_pd(t, lam), below);
    _mm256_storeu_pd(u + i, r);
  }
  for (; i < n; ++i) {
    const double t = u[i];
    double r = 0.0;
    if (t > lambda) r = t - lambda;
    if (t < -lambda) r = t + lambda;
    u[i] = r;
  }
}

void group_soft_threshold(double* const* blocks, std::size_t d, std::size_t n, double lambda) {
  const __m256d lam = _mm256_set1_pd(lambda);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) {
    const __m256d nrm = _mm256_sqrt_pd(group_sq(blocks, d, i));
    const __m256d keep = _mm256_cmp_pd(nrm, lam, _CMP_GT_OQ);
    const __m256d f = _mm256_blendv_pd(zero, _mm256_div_pd(_mm256_sub_pd(nrm, lam), nrm), keep);
    for (std::size_t j = 0; j < d; ++j)
      _mm256_storeu_pd(blocks[j] + i, _mm256_mul_pd(_mm256_loadu_pd(blocks[j] + i), f));
  }
  for (; i < n; ++i) {
    const double nrm = std::sqrt(group_sq_scalar(blocks, d, i));
    const double f = nrm > lambda ? (nrm - lambda) / nrm : 0.0;
    for (std::size_t j = 0; j < d; ++j) blocks[j][i] *= f;
  }
}

void clamp_unit(double* p, std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d neg_one = _mm256_set1_pd(-1.0);
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) {
    const __m256d v = _mm256_loadu_pd(p + i);
    _mm256_storeu_pd(p + i, _mm256_min_pd(_mm256_max_pd(v, neg_one), one));
  }
  for (; i < n; ++i) p[i] = p[i] < -1.0 ? -1.0 : (p[i] > 1.0 ? 1.0 : p[i]);
}

void project_unit_groups(double* const* blocks, std::size_t d, std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) {
    const __m256d nrm = _mm256_sqrt_pd(group_sq(blocks, d, i));
    const __m256d div = _mm256_blendv_pd(one, nrm, _mm256_cmp_pd(nrm, one, _CMP_GT_OQ));
    for (std::size_t j = 0; j < d; ++j)
      _mm256_storeu_pd(blocks[j] + i, _mm256_div_pd(_mm256_loadu_pd(blocks[j] + i), div));
  }
  for (; i < n; ++i) {
    const double nrm = std::sqrt(group_sq_scalar(blocks, d, i));
    const double div = nrm > 1.0 ? nrm : 1.0;
    for (std::size_t j = 0; j < d; ++j) blocks[j][i] /= div;
  }
}

}  // namespace

const Table& avx2_table() {
  static const Table table{
      "avx2",
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
