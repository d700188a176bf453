#include <stdexcept>
#include <vector>

#include "tvprox/error.hpp"
#include "tvprox/exact_prox.hpp"

namespace tvprox {

// Direct 1D TV denoising: the solution is traced segment by segment while
// keeping the range [lo, hi] of admissible segment values and the running
// residual bounds. A segment is emitted as soon as extending it would push
// the taut string outside its tube of half-width tau.
NdSignal tautstring_prox_1d(const NdSignal& z, double tau) {
  if (z.dims() != 1) throw ShapeError("tautstring_prox_1d: signal must be 1D");
  if (!(tau > 0.0)) throw std::invalid_argument("tautstring_prox_1d: tau must be > 0");

  const std::vector<double> in(z.values().begin(), z.values().end());
  const std::size_t n = in.size();
  std::vector<double> out(n);
  if (n == 1) return z;

  const double two_tau = 2.0 * tau;
  std::size_t k = 0, k0 = 0;
  std::size_t k_minus = 0, k_plus = 0;
  double u_min = tau, u_max = -tau;
  double v_min = in[0] - tau, v_max = in[0] + tau;

  for (;;) {
    while (k == n - 1) {
      if (u_min < 0.0) {
        do out[k0++] = v_min; while (k0 <= k_minus);
        k = k_minus = k0;
        v_min = in[k];
        u_min = tau;
        u_max = v_min + u_min - v_max;
      } else if (u_max > 0.0) {
        do out[k0++] = v_max; while (k0 <= k_plus);
        k = k_plus = k0;
        v_max = in[k];
        u_max = -tau;
        u_min = v_max + u_max - v_min;
      } else {
        v_min += u_min / static_cast<double>(k - k0 + 1);
        do out[k0++] = v_min; while (k0 <= k);
        return NdSignal(z.shape(), std::move(out));
      }
    }
    u_min += in[k + 1] - v_min;
    if (u_min < -tau) {
      do out[k0++] = v_min; while (k0 <= k_minus);
      k = k_minus = k_plus = k0;
      v_min = in[k];
      v_max = v_min + two_tau;
      u_min = tau;
      u_max = -tau;
      continue;
    }
    u_max += in[k + 1] - v_max;
    if (u_max > tau) {
      do out[k0++] = v_max; while (k0 <= k_plus);
      k = k_minus = k_plus = k0;
      v_max = in[k];
      v_min = v_max - two_tau;
      u_min = tau;
      u_max = -tau;
      continue;
    }
    ++k;
    if (u_min >= tau) {
      k_minus = k;
      v_min += (u_min - tau) / static_cast<double>(k - k0 + 1);
      u_min = tau;
    }
    if (u_max <= -tau) {
      k_plus = k;
      v_max += (u_max + tau) / static_cast<double>(k - k0 + 1);
      u_max = -tau;
    }
  }
}

}  // namespace tvprox
