#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tvprox/nd_signal.hpp"

namespace tvprox {

/// A matrix-free linear map with its adjoint. Shapes are checked on every
/// application.
class LinearOperator {
 public:
  using Map = std::function<NdSignal(const NdSignal&)>;

  LinearOperator(Map apply, Map adjoint, NdSignal::Shape in_shape, NdSignal::Shape out_shape,
                 std::optional<double> lipschitz_bound = std::nullopt);

  NdSignal apply(const NdSignal& x) const;
  NdSignal adjoint(const NdSignal& r) const;

  const NdSignal::Shape& in_shape() const noexcept { return in_shape_; }
  const NdSignal::Shape& out_shape() const noexcept { return out_shape_; }

  /// Cached estimate of ||A||^2, the Lipschitz constant of x -> A^T(Ax - y).
  std::optional<double> lipschitz_bound() const noexcept { return lipschitz_; }
  void set_lipschitz_bound(double value) { lipschitz_ = value; }

 private:
  Map apply_;
  Map adjoint_;
  NdSignal::Shape in_shape_;
  NdSignal::Shape out_shape_;
  std::optional<double> lipschitz_;
};

LinearOperator identity_operator(const NdSignal::Shape& shape);
/// Elementwise multiplication by `diag` (self-adjoint).
LinearOperator diagonal_operator(const NdSignal& diag);

/// Parallel-beam geometry over a square image of unit pixels centred on the
/// origin. Detector bins have pixel spacing and are centred on the rotation
/// axis; with the default count, the bin centres of the 0 rad view coincide
/// with the pixel-column centres.
struct CtGeometry {
  std::size_t n_pixels = 0;
  std::vector<double> angles;  ///< radians, strictly increasing in [0, pi)
  std::size_t n_detectors = 0;
  double pixel_size = 1.0;

  /// n_angles equispaced angles k*pi/n_angles. n_detectors = 0 selects the
  /// default: ceil(n_pixels*sqrt(2)), bumped by one if needed so that
  /// n_detectors - n_pixels is even.
  static CtGeometry parallel(std::size_t n_pixels, std::size_t n_angles,
                             std::size_t n_detectors = 0);
  static std::size_t default_detectors(std::size_t n_pixels);

  std::size_t n_angles() const noexcept { return angles.size(); }
  NdSignal::Shape image_shape() const { return {n_pixels, n_pixels}; }
  NdSignal::Shape sinogram_shape() const { return {angles.size(), n_detectors}; }
  void validate() const;
};

/// Pixel-driven projector: each pixel centre is projected onto the detector
/// axis of every view and its value is split between the two nearest bins by
/// linear interpolation (weights sum to one, so every view conserves mass).
NdSignal radon_forward(const NdSignal& img, const CtGeometry& geo);
/// Exact transpose of radon_forward.
NdSignal radon_adjoint(const NdSignal& sino, const CtGeometry& geo);
LinearOperator radon_operator(const CtGeometry& geo);

struct PowerIterationResult {
  double estimate = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Largest eigenvalue of A^T A (= ||A||^2) by power iteration from a seeded
/// Gaussian start. Converged once the eigen-residual ||A^T A v - mu v|| drops
/// below tol * mu; otherwise reports the last Rayleigh quotient.
PowerIterationResult lipschitz_power_iter(const LinearOperator& op, std::size_t iters = 100,
                                          double tol = 1e-6, std::uint64_t seed = 0);

/// x + e with e i.i.d. N(0, sigma^2), deterministic per seed.
NdSignal add_awgn(const NdSignal& x, double sigma, std::uint64_t seed);

/// argmin_x 1/2 ||x - v||^2 + gamma/2 ||y - x||^2 = (v + gamma y) / (1 + gamma).
NdSignal prox_g_denoise(const NdSignal& v, double gamma, const NdSignal& y);

struct CgResult {
  NdSignal x;
  double residual = 0.0;  ///< ||(I + gamma A^T A) x - rhs|| / ||rhs||
  std::size_t iterations = 0;
  bool converged = false;
};

/// prox of gamma/2 ||A x - y||^2 at v: solves (I + gamma A^T A) x = v + gamma A^T y
/// by conjugate gradients started from v.
CgResult prox_g_ct(const NdSignal& v, double gamma, const NdSignal& y, const LinearOperator& op,
                   double cg_tol = 1e-10, std::size_t cg_max = 200);

/// 1/2 ||A x - y||^2 and its gradient A^T(A x - y).
double least_squares_value(const LinearOperator& op, const NdSignal& x, const NdSignal& y);
NdSignal least_squares_gradient(const LinearOperator& op, const NdSignal& x, const NdSignal& y);

void write_sinogram_csv(std::ostream& os, const NdSignal& sino);
void save_sinogram_csv(const std::string& path, const NdSignal& sino);
NdSignal load_sinogram_csv(const std::string& path);

}  // namespace tvprox
