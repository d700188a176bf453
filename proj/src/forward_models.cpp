#include "tvprox/forward_models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "tvprox/error.hpp"

namespace tvprox {

LinearOperator::LinearOperator(Map apply, Map adjoint, NdSignal::Shape in_shape,
                               NdSignal::Shape out_shape, std::optional<double> lipschitz_bound)
    : apply_(std::move(apply)),
      adjoint_(std::move(adjoint)),
      in_shape_(std::move(in_shape)),
      out_shape_(std::move(out_shape)),
      lipschitz_(lipschitz_bound) {
  if (!apply_ || !adjoint_) throw std::invalid_argument("LinearOperator: empty map");
}

NdSignal LinearOperator::apply(const NdSignal& x) const {
  if (x.shape() != in_shape_)
    throw ShapeError("LinearOperator::apply: expected " + shape_string(in_shape_) + ", got " +
                     shape_string(x.shape()));
  return apply_(x);
}

NdSignal LinearOperator::adjoint(const NdSignal& r) const {
  if (r.shape() != out_shape_)
    throw ShapeError("LinearOperator::adjoint: expected " + shape_string(out_shape_) + ", got " +
                     shape_string(r.shape()));
  return adjoint_(r);
}

LinearOperator identity_operator(const NdSignal::Shape& shape) {
  auto id = [](const NdSignal& x) { return x; };
  return LinearOperator(id, id, shape, shape, 1.0);
}

LinearOperator diagonal_operator(const NdSignal& diag) {
  diag.require_finite("diagonal_operator");
  double peak = 0.0;
  for (double v : diag.values()) peak = std::max(peak, std::abs(v));
  auto mul = [diag](const NdSignal& x) {
    NdSignal out = x;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= diag[i];
    return out;
  };
  return LinearOperator(mul, mul, diag.shape(), diag.shape(), peak * peak);
}

// ---------------------------------------------------------------------------
// Parallel-beam projector

std::size_t CtGeometry::default_detectors(std::size_t n_pixels) {
  auto n = static_cast<std::size_t>(std::ceil(static_cast<double>(n_pixels) * std::numbers::sqrt2));
  if ((n - n_pixels) % 2 != 0) ++n;
  return n;
}

CtGeometry CtGeometry::parallel(std::size_t n_pixels, std::size_t n_angles,
                                std::size_t n_detectors) {
  CtGeometry geo;
  geo.n_pixels = n_pixels;
  geo.n_detectors = n_detectors == 0 ? default_detectors(n_pixels) : n_detectors;
  geo.angles.resize(n_angles);
  for (std::size_t k = 0; k < n_angles; ++k)
    geo.angles[k] = std::numbers::pi * static_cast<double>(k) / static_cast<double>(n_angles);
  geo.validate();
  return geo;
}

void CtGeometry::validate() const {
  if (n_pixels == 0) throw ConfigError("CtGeometry: n_pixels must be positive");
  if (n_detectors == 0) throw ConfigError("CtGeometry: n_detectors must be positive");
  if (angles.empty()) throw ConfigError("CtGeometry: need at least one angle");
  if (!(pixel_size > 0.0) || !std::isfinite(pixel_size))
    throw ConfigError("CtGeometry: pixel_size must be positive");
  for (std::size_t k = 0; k < angles.size(); ++k) {
    if (!(angles[k] >= 0.0 && angles[k] < std::numbers::pi))
      throw ConfigError("CtGeometry: angles must lie in [0, pi)");
    if (k > 0 && !(angles[k] > angles[k - 1]))
      throw ConfigError("CtGeometry: angles must be strictly increasing");
  }
}

namespace {

struct Footprint {
  long bin;   // lower bin, may be out of range
  double w;   // weight of bin + 1; bin gets 1 - w
};

// Calls f(pixel_index, footprint) for every pixel of one view, in row-major order.
template <class F>
void for_each_footprint(const CtGeometry& geo, double angle, F&& f) {
  const std::size_t n = geo.n_pixels;
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const double half_img = (static_cast<double>(n) - 1.0) / 2.0;
  const double half_det = (static_cast<double>(geo.n_detectors) - 1.0) / 2.0;
  for (std::size_t r = 0; r < n; ++r) {
    const double y = (half_img - static_cast<double>(r)) * geo.pixel_size;
    for (std::size_t col = 0; col < n; ++col) {
      const double x = (static_cast<double>(col) - half_img) * geo.pixel_size;
      const double u = (x * c + y * s) / geo.pixel_size + half_det;
      const double lo = std::floor(u);
      f(r * n + col, Footprint{static_cast<long>(lo), u - lo});
    }
  }
}

void check_image(const NdSignal& img, const CtGeometry& geo) {
  if (img.shape() != geo.image_shape())
    throw ShapeError("radon: image " + shape_string(img.shape()) + " does not match geometry " +
                     shape_string(geo.image_shape()));
}

void check_sinogram(const NdSignal& sino, const CtGeometry& geo) {
  if (sino.shape() != geo.sinogram_shape())
    throw ShapeError("radon: sinogram " + shape_string(sino.shape()) +
                     " does not match geometry " + shape_string(geo.sinogram_shape()));
}

}  // namespace

NdSignal radon_forward(const NdSignal& img, const CtGeometry& geo) {
  geo.validate();
  check_image(img, geo);
  NdSignal sino(geo.sinogram_shape());
  const long nd = static_cast<long>(geo.n_detectors);
  const double ps = geo.pixel_size;
  for (std::size_t a = 0; a < geo.n_angles(); ++a) {
    double* row = sino.data() + a * geo.n_detectors;
    for_each_footprint(geo, geo.angles[a], [&](std::size_t p, Footprint fp) {
      const double v = img[p] * ps;
      if (fp.bin >= 0 && fp.bin < nd) row[fp.bin] += (1.0 - fp.w) * v;
      if (fp.bin + 1 >= 0 && fp.bin + 1 < nd) row[fp.bin + 1] += fp.w * v;
    });
  }
  return sino;
}

NdSignal radon_adjoint(const NdSignal& sino, const CtGeometry& geo) {
  geo.validate();
  check_sinogram(sino, geo);
  NdSignal img(geo.image_shape());
  const long nd = static_cast<long>(geo.n_detectors);
  const double ps = geo.pixel_size;
  for (std::size_t a = 0; a < geo.n_angles(); ++a) {
    const double* row = sino.data() + a * geo.n_detectors;
    for_each_footprint(geo, geo.angles[a], [&](std::size_t p, Footprint fp) {
      double acc = 0.0;
      if (fp.bin >= 0 && fp.bin < nd) acc += (1.0 - fp.w) * row[fp.bin];
      if (fp.bin + 1 >= 0 && fp.bin + 1 < nd) acc += fp.w * row[fp.bin + 1];
      img[p] += acc * ps;
    });
  }
  return img;
}

LinearOperator radon_operator(const CtGeometry& geo) {
  geo.validate();
  return LinearOperator([geo](const NdSignal& x) { return radon_forward(x, geo); },
                        [geo](const NdSignal& r) { return radon_adjoint(r, geo); },
                        geo.image_shape(), geo.sinogram_shape());
}

// ---------------------------------------------------------------------------

PowerIterationResult lipschitz_power_iter(const LinearOperator& op, std::size_t iters, double tol,
                                          std::uint64_t seed) {
  if (!(tol > 0.0)) throw ConfigError("lipschitz_power_iter: tol must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  NdSignal v(op.in_shape());
  for (double& e : v.values()) e = gauss(rng);
  v *= 1.0 / l2_norm(v);

  PowerIterationResult res;
  for (std::size_t k = 0; k < iters; ++k) {
    NdSignal w = op.adjoint(op.apply(v));
    const double mu = dot(v, w);
    res.estimate = mu;
    res.iterations = k + 1;
    const double wn = l2_norm(w);
    if (wn == 0.0) {
      res.converged = true;
      break;
    }
    if (l2_norm(axpby(1.0, w, -mu, v)) <= tol * mu) {
      res.converged = true;
      break;
    }
    v = (1.0 / wn) * std::move(w);
  }
  return res;
}

NdSignal add_awgn(const NdSignal& x, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ConfigError("add_awgn: sigma must be >= 0");
  NdSignal out = x;
  if (sigma == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, sigma);
  for (double& e : out.values()) e += gauss(rng);
  return out;
}

NdSignal prox_g_denoise(const NdSignal& v, double gamma, const NdSignal& y) {
  require_same_shape(v, y, "prox_g_denoise");
  if (!(gamma > 0.0)) throw ConfigError("prox_g_denoise: gamma must be positive");
  const double inv = 1.0 / (1.0 + gamma);
  return axpby(inv, v, gamma * inv, y);
}

CgResult prox_g_ct(const NdSignal& v, double gamma, const NdSignal& y, const LinearOperator& op,
                   double cg_tol, std::size_t cg_max) {
  if (!(gamma > 0.0)) throw ConfigError("prox_g_ct: gamma must be positive");
  auto normal = [&](const NdSignal& x) { return axpby(1.0, x, gamma, op.adjoint(op.apply(x))); };
  const NdSignal rhs = axpby(1.0, v, gamma, op.adjoint(y));
  const double rhs_norm = l2_norm(rhs);

  CgResult res;
  res.x = v;
  if (rhs_norm == 0.0) {
    res.x = NdSignal::zeros_like(v);
    res.converged = true;
    return res;
  }
  NdSignal r = rhs - normal(res.x);
  NdSignal p = r;
  double rr = dot(r, r);
  const double target = cg_tol * rhs_norm;
  res.residual = std::sqrt(rr) / rhs_norm;
  while (std::sqrt(rr) > target && res.iterations < cg_max) {
    const NdSignal q = normal(p);
    const double pq = dot(p, q);
    if (!(pq > 0.0)) break;
    const double alpha = rr / pq;
    res.x = axpby(1.0, res.x, alpha, p);
    r = axpby(1.0, r, -alpha, q);
    const double rr_next = dot(r, r);
    p = axpby(1.0, r, rr_next / rr, p);
    rr = rr_next;
    ++res.iterations;
  }
  // Report the true residual rather than the recursively updated one.
  res.residual = l2_norm(rhs - normal(res.x)) / rhs_norm;
  res.converged = res.residual <= cg_tol;
  return res;
}

double least_squares_value(const LinearOperator& op, const NdSignal& x, const NdSignal& y) {
  const double r = l2_norm(op.apply(x) - y);
  return 0.5 * r * r;
}

NdSignal least_squares_gradient(const LinearOperator& op, const NdSignal& x, const NdSignal& y) {
  return op.adjoint(op.apply(x) - y);
}

// ---------------------------------------------------------------------------

void write_sinogram_csv(std::ostream& os, const NdSignal& sino) {
  if (sino.dims() != 2) throw ShapeError("write_sinogram_csv: sinogram must be 2-D");
  os << "angles=" << sino.extent(0) << ",detectors=" << sino.extent(1) << '\n';
  char buf[32];
  for (std::size_t a = 0; a < sino.extent(0); ++a) {
    for (std::size_t k = 0; k < sino.extent(1); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", sino[a * sino.extent(1) + k]);
      if (k) os << ',';
      os << buf;
    }
    os << '\n';
  }
}

void save_sinogram_csv(const std::string& path, const NdSignal& sino) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_sinogram_csv(os, sino);
}

NdSignal load_sinogram_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::string header;
  std::getline(is, header);
  std::size_t angles = 0, detectors = 0;
  if (std::sscanf(header.c_str(), "angles=%zu,detectors=%zu", &angles, &detectors) != 2)
    throw std::runtime_error("load_sinogram_csv: bad header '" + header + "'");
  std::vector<double> values;
  values.reserve(angles * detectors);
  std::string line, tok;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream cells(line);
    while (std::getline(cells, tok, ',')) values.push_back(std::stod(tok));
  }
  if (values.size() != angles * detectors)
    throw std::runtime_error("load_sinogram_csv: expected " + std::to_string(angles * detectors) +
                             " values, got " + std::to_string(values.size()));
  return NdSignal({angles, detectors}, std::move(values));
}

}  // namespace tvprox
