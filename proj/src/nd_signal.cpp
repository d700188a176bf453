#include "tvprox/nd_signal.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "tvprox/error.hpp"
#include "tvprox/kernels.hpp"

namespace tvprox {
namespace {

std::size_t checked_size(const NdSignal::Shape& shape) {
  if (shape.empty() || shape.size() > 3)
    throw ShapeError("NdSignal: dimension count must be 1, 2 or 3, got " +
                     std::to_string(shape.size()));
  std::size_t n = 1;
  for (std::size_t e : shape) {
    if (e == 0) throw ShapeError("NdSignal: zero extent in shape " + shape_string(shape));
    n *= e;
  }
  return n;
}

}  // namespace

NdSignal::NdSignal(Shape shape, double fill) : shape_(std::move(shape)) {
  if (!std::isfinite(fill)) throw std::domain_error("NdSignal: non-finite fill value");
  data_.assign(checked_size(shape_), fill);
}

NdSignal::NdSignal(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  const std::size_t n = checked_size(shape_);
  if (data_.size() != n)
    throw ShapeError("NdSignal: " + std::to_string(data_.size()) + " values for shape " +
                     shape_string(shape_));
  require_finite("NdSignal");
}

std::size_t NdSignal::stride(std::size_t axis) const {
  if (axis >= shape_.size()) throw std::out_of_range("NdSignal::stride: invalid axis");
  std::size_t s = 1;
  for (std::size_t k = axis + 1; k < shape_.size(); ++k) s *= shape_[k];
  return s;
}

bool NdSignal::all_finite() const noexcept {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

void NdSignal::require_finite(const char* what) const {
  if (!all_finite()) throw std::domain_error(std::string(what) + ": non-finite value");
}

std::size_t NdSignal::flat_index(std::span<const std::size_t> index) const {
  if (index.size() != shape_.size()) throw ShapeError("flat_index: wrong index rank");
  std::size_t flat = 0;
  for (std::size_t k = 0; k < shape_.size(); ++k) {
    if (index[k] >= shape_[k]) throw std::out_of_range("flat_index: index out of range");
    flat = flat * shape_[k] + index[k];
  }
  return flat;
}

NdSignal& NdSignal::operator+=(const NdSignal& rhs) {
  require_same_shape(*this, rhs, "operator+=");
  kernels::active().axpby(1.0, data_.data(), 1.0, rhs.data(), data_.data(), data_.size());
  return *this;
}

NdSignal& NdSignal::operator-=(const NdSignal& rhs) {
  require_same_shape(*this, rhs, "operator-=");
  kernels::active().axpby(1.0, data_.data(), -1.0, rhs.data(), data_.data(), data_.size());
  return *this;
}

NdSignal& NdSignal::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

NdSignal operator+(NdSignal lhs, const NdSignal& rhs) { return lhs += rhs; }
NdSignal operator-(NdSignal lhs, const NdSignal& rhs) { return lhs -= rhs; }
NdSignal operator*(double s, NdSignal x) { return x *= s; }

NdSignal axpby(double a, const NdSignal& x, double b, const NdSignal& y) {
  require_same_shape(x, y, "axpby");
  NdSignal out = NdSignal::zeros_like(x);
  kernels::active().axpby(a, x.data(), b, y.data(), out.data(), x.size());
  return out;
}

std::string shape_string(const NdSignal::Shape& shape) {
  std::string s;
  for (std::size_t k = 0; k < shape.size(); ++k) {
    if (k) s += 'x';
    s += std::to_string(shape[k]);
  }
  return s;
}

void require_same_shape(const NdSignal& a, const NdSignal& b, const char* what) {
  if (!a.same_shape(b))
    throw ShapeError(std::string(what) + ": shape mismatch " + shape_string(a.shape()) + " vs " +
                     shape_string(b.shape()));
}

double dot(const NdSignal& a, const NdSignal& b) {
  require_same_shape(a, b, "dot");
  return kernels::active().dot(a.data(), b.data(), a.size());
}

double l2_norm(const NdSignal& a) { return std::sqrt(kernels::active().dot(a.data(), a.data(), a.size())); }

double rel_change(const NdSignal& x_t, const NdSignal& x_prev) {
  require_same_shape(x_t, x_prev, "rel_change");
  const double denom = l2_norm(x_prev);
  if (denom == 0.0) throw ZeroDenominatorError("rel_change: previous iterate is zero");
  return l2_norm(x_t - x_prev) / denom;
}

double mean(const NdSignal& a) {
  return kernels::active().sum(a.data(), a.size()) / static_cast<double>(a.size());
}

double max_abs_diff(const NdSignal& a, const NdSignal& b) {
  require_same_shape(a, b, "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

void write_csv(std::ostream& os, const NdSignal& x) {
  os << "shape=" << shape_string(x.shape()) << '\n';
  const std::size_t row = x.shape().back();
  char buf[32];
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", x[i]);
    os << buf << ((i + 1) % row == 0 ? '\n' : ',');
  }
}

NdSignal read_csv(std::istream& is) {
  std::string header;
  if (!std::getline(is, header) || header.rfind("shape=", 0) != 0)
    throw std::runtime_error("read_csv: missing 'shape=' header");
  NdSignal::Shape shape;
  std::stringstream dims(header.substr(6));
  std::string tok;
  while (std::getline(dims, tok, 'x')) {
    std::size_t e = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), e);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
      throw std::runtime_error("read_csv: bad extent '" + tok + "'");
    shape.push_back(e);
  }
  std::vector<double> values;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    std::stringstream cells(line);
    while (std::getline(cells, tok, ',')) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(tok, &used));
      } catch (const std::exception&) {
        throw std::runtime_error("read_csv: bad value '" + tok + "'");
      }
    }
  }
  return NdSignal(std::move(shape), std::move(values));
}

void save_csv(const std::string& path, const NdSignal& x) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_csv(os, x);
}

NdSignal load_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_csv(is);
}

}  // namespace tvprox
