#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace tvprox {

/// Dense real signal on a d-dimensional grid (1 <= d <= 3), row-major with the
/// last axis fastest. Axis j of a d-dimensional signal has stride
/// prod(shape[j+1..d-1]).
///
/// Extents must be positive. Operators built on finite differences (the Haar
/// frame, TV) additionally require every extent to be at least 2 and check
/// that themselves, so that measurement-domain data such as a single-view
/// sinogram can live in the same container.
class NdSignal {
 public:
  using Shape = std::vector<std::size_t>;

  NdSignal() = default;
  explicit NdSignal(Shape shape, double fill = 0.0);
  NdSignal(Shape shape, std::vector<double> data);

  static NdSignal zeros_like(const NdSignal& other) { return NdSignal(other.shape_); }

  const Shape& shape() const noexcept { return shape_; }
  std::size_t dims() const noexcept { return shape_.size(); }
  std::size_t size() const noexcept { return data_.size(); }
  std::size_t extent(std::size_t axis) const { return shape_.at(axis); }
  std::size_t stride(std::size_t axis) const;

  std::span<const double> values() const noexcept { return data_; }
  std::span<double> values() noexcept { return data_; }
  const double* data() const noexcept { return data_.data(); }
  double* data() noexcept { return data_.data(); }

  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }

  bool same_shape(const NdSignal& other) const noexcept { return shape_ == other.shape_; }
  bool all_finite() const noexcept;
  /// Throws std::domain_error if any value is NaN or infinite.
  void require_finite(const char* what) const;

  /// Row-major flat index of a multi-index with dims() entries.
  std::size_t flat_index(std::span<const std::size_t> index) const;

  NdSignal& operator+=(const NdSignal& rhs);
  NdSignal& operator-=(const NdSignal& rhs);
  NdSignal& operator*=(double s);

  friend bool operator==(const NdSignal&, const NdSignal&) = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

NdSignal operator+(NdSignal lhs, const NdSignal& rhs);
NdSignal operator-(NdSignal lhs, const NdSignal& rhs);
NdSignal operator*(double s, NdSignal x);

/// out = a*x + b*y.
NdSignal axpby(double a, const NdSignal& x, double b, const NdSignal& y);

std::string shape_string(const NdSignal::Shape& shape);
void require_same_shape(const NdSignal& a, const NdSignal& b, const char* what);

double dot(const NdSignal& a, const NdSignal& b);
double l2_norm(const NdSignal& a);
/// ||x_t - x_prev|| / ||x_prev||. Throws ZeroDenominatorError when x_prev = 0.
double rel_change(const NdSignal& x_t, const NdSignal& x_prev);
double mean(const NdSignal& a);
double max_abs_diff(const NdSignal& a, const NdSignal& b);

// Plain-text format: a header line "shape=e1xe2[x...]" followed by the values,
// one line per last-axis row, comma separated, printed with 17 significant digits.
void write_csv(std::ostream& os, const NdSignal& x);
NdSignal read_csv(std::istream& is);
void save_csv(const std::string& path, const NdSignal& x);
NdSignal load_csv(const std::string& path);

}  // namespace tvprox
