#pragma once

#include <span>
#include <vector>

#include "tvprox/haar_frame.hpp"
#include "tvprox/nd_signal.hpp"
#include "tvprox/tv_functional.hpp"

namespace tvprox {

/// Scale tau > 0 (finite) of the approximate TV prox.
class ProxParams {
 public:
  ProxParams(double tau, TvMode mode);

  double tau() const noexcept { return tau_; }
  TvMode mode() const noexcept { return mode_; }
  /// Threshold applied to the frame's difference coefficients: 2 tau sqrt(d).
  double threshold(std::size_t dims) const;

 private:
  double tau_;
  TvMode mode_;
};

/// max(|t| - lambda, 0) sign(t). Throws std::invalid_argument for lambda < 0.
double shrink_aniso(double t, double lambda);

/// max(||v|| - lambda, 0) v / ||v||; the zero vector maps to zero.
std::vector<double> shrink_iso(std::span<const double> v, double lambda);

/// Shrinks the difference half of the stack, entrywise (aniso) or per
/// location group (iso); averaging blocks pass through untouched.
CoeffStack threshold_stack(const CoeffStack& u, double lambda, TvMode mode);
void threshold_stack_inplace(CoeffStack& u, double lambda, TvMode mode);

/// S_tau(z) = W^T T_{2 tau sqrt d}(W z). One pass over the frame, no iterations.
NdSignal approx_prox(const NdSignal& z, const ProxParams& params);

}  // namespace tvprox
