#pragma once

// First-level redundant Haar frame built from per-axis circular convolutions
// with the averaging kernel [1, 1] and the difference kernel [1, -1]:
//
//   [A_j x]_i = x_i + x_{i+e_j},   [D_j x]_i = x_i - x_{i+e_j}   (indices wrap)
//   W = 1/(2 sqrt d) [A_1; ...; A_d; D_1; ...; D_d]
//
// With periodic boundaries W^T W = I holds exactly, while W W^T != I.

#include <cstddef>
#include <span>
#include <vector>

#include "tvprox/nd_signal.hpp"

namespace tvprox {

/// Throws ShapeError unless every extent is >= 2.
void require_frame_shape(const NdSignal& x, const char* what);

NdSignal avg_axis(const NdSignal& x, std::size_t axis);
NdSignal diff_axis(const NdSignal& x, std::size_t axis);
NdSignal avg_axis_adjoint(const NdSignal& t, std::size_t axis);
NdSignal diff_axis_adjoint(const NdSignal& t, std::size_t axis);

/// Frame coefficients W z: blocks avg_1..avg_d then dif_1..dif_d, n values each.
class CoeffStack {
 public:
  CoeffStack() = default;
  explicit CoeffStack(NdSignal::Shape shape);

  const NdSignal::Shape& shape() const noexcept { return shape_; }
  std::size_t dims() const noexcept { return shape_.size(); }
  /// Values per block (the signal size n).
  std::size_t block_size() const noexcept { return n_; }

  std::span<double> avg(std::size_t j) { return block(j); }
  std::span<const double> avg(std::size_t j) const { return block(j); }
  std::span<double> dif(std::size_t j) { return block(dims() + j); }
  std::span<const double> dif(std::size_t j) const { return block(dims() + j); }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  friend bool operator==(const CoeffStack&, const CoeffStack&) = default;

 private:
  std::span<double> block(std::size_t b) { return {data_.data() + b * n_, n_}; }
  std::span<const double> block(std::size_t b) const { return {data_.data() + b * n_, n_}; }

  NdSignal::Shape shape_;
  std::size_t n_ = 0;
  std::vector<double> data_;
};

double dot(const CoeffStack& a, const CoeffStack& b);
double l2_norm(const CoeffStack& u);
CoeffStack operator-(const CoeffStack& a, const CoeffStack& b);

CoeffStack w_forward(const NdSignal& z);
NdSignal w_adjoint(const CoeffStack& u);

// Finite differences shared by the TV functional and the exact prox solver.

enum class Boundary {
  circular,  ///< periodic differences, consistent with the frame
  free,      ///< no difference across the last sample of an axis
};

/// d blocks of n values: block j holds [D_j x]_i.
class GradientField {
 public:
  GradientField() = default;
  explicit GradientField(NdSignal::Shape shape);

  const NdSignal::Shape& shape() const noexcept { return shape_; }
  std::size_t dims() const noexcept { return shape_.size(); }
  std::size_t block_size() const noexcept { return n_; }
  std::span<double> block(std::size_t j) { return {data_.data() + j * n_, n_}; }
  std::span<const double> block(std::size_t j) const { return {data_.data() + j * n_, n_}; }
  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

 private:
  NdSignal::Shape shape_;
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// out.block(j) = D_j x (scaled by `scale`); free boundary zeroes the last
/// sample along each axis.
void forward_differences(const NdSignal& x, Boundary boundary, GradientField& out,
                         double scale = 1.0);
GradientField forward_differences(const NdSignal& x, Boundary boundary = Boundary::circular);

/// out += scale * sum_j D_j^T t_j. With Boundary::free the entries of t on the
/// last sample of each axis are ignored.
void accumulate_difference_adjoint(const GradientField& t, Boundary boundary, NdSignal& out,
                                   double scale = 1.0);
NdSignal difference_adjoint(const GradientField& t, Boundary boundary = Boundary::circular);

/// Zero the entries of block j that sit on the last sample of axis j.
void mask_free_boundary(GradientField& t);

}  // namespace tvprox
