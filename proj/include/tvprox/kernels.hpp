#pragma once

// Data-parallel inner loops shared by the frame, TV and solver code.
//
// Every kernel exists as a scalar reference and, on x86-64, as an AVX2 variant.
// The variant is picked once at startup (CPU support, overridable with the
// TVPROX_KERNELS environment variable set to "scalar" or "avx2").
//
// The variants are bitwise interchangeable: elementwise kernels use the same
// operation sequence per element, and reductions accumulate into four
// interleaved partial sums (element i goes to lane i % 4) that are combined as
// (s0 + s1) + (s2 + s3). The scalar code spells that order out explicitly.

#include <cstddef>
#include <string_view>

namespace tvprox::kernels {

struct Table {
  const char* name;

  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum)(const double* a, std::size_t n);
  double (*abs_sum)(const double* a, std::size_t n);
  /// sum_i sqrt(sum_j blocks[j][i]^2) over d blocks of n entries.
  double (*group_norm_sum)(const double* const* blocks, std::size_t d, std::size_t n);

  /// out = scale * (a + sign * b), sign in {+1, -1}.
  void (*combine)(const double* a, const double* b, double* out, std::size_t n, double scale,
                  double sign);
  /// out += (avg + dif) + (avg_prev - dif_prev).
  void (*accumulate_haar_adjoint)(const double* avg, const double* dif, const double* avg_prev,
                                  const double* dif_prev, double* out, std::size_t n);
  /// out += scale * (t - t_prev).
  void (*accumulate_diff_adjoint)(const double* t, const double* t_prev, double* out,
                                  std::size_t n, double scale);
  /// out = a*x + b*y.
  void (*axpby)(double a, const double* x, double b, const double* y, double* out, std::size_t n);

  /// u <- sign(u) * max(|u| - lambda, 0), in place.
  void (*soft_threshold)(double* u, std::size_t n, double lambda);
  /// Groups are (blocks[0][i], ..., blocks[d-1][i]); each is scaled by
  /// max(||g|| - lambda, 0) / ||g||, zero groups stay zero.
  void (*group_soft_threshold)(double* const* blocks, std::size_t d, std::size_t n, double lambda);
  /// p <- clamp(p, -1, 1).
  void (*clamp_unit)(double* p, std::size_t n);
  /// Each group g <- g / max(1, ||g||).
  void (*project_unit_groups)(double* const* blocks, std::size_t d, std::size_t n);
};

const Table& scalar();
/// nullptr when the AVX2 variant was not compiled in or the CPU lacks AVX2.
const Table* avx2();

/// The table used by the library.
const Table& active();
/// Switch the active table; throws std::invalid_argument for an unknown or
/// unavailable name. Intended for tests and the CLI, not for concurrent use.
void select(std::string_view name);

}  // namespace tvprox::kernels
