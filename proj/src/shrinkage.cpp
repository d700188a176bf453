#include "tvprox/shrinkage.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "tvprox/kernels.hpp"

namespace tvprox {
namespace {

void require_threshold(double lambda, const char* what) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument(std::string(what) + ": threshold must be finite and >= 0, got " +
                                std::to_string(lambda));
}

}  // namespace

ProxParams::ProxParams(double tau, TvMode mode) : tau_(tau), mode_(mode) {
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw std::invalid_argument("ProxParams: tau must be finite and > 0, got " +
                                std::to_string(tau));
}

double ProxParams::threshold(std::size_t dims) const {
  return 2.0 * tau_ * std::sqrt(static_cast<double>(dims));
}

double shrink_aniso(double t, double lambda) {
  require_threshold(lambda, "shrink_aniso");
  if (t > lambda) return t - lambda;
  if (t < -lambda) return t + lambda;
  return 0.0;
}

std::vector<double> shrink_iso(std::span<const double> v, double lambda) {
  require_threshold(lambda, "shrink_iso");
  double sq = 0.0;
  for (double x : v) sq += x * x;
  const double nrm = std::sqrt(sq);
  const double f = nrm > lambda ? (nrm - lambda) / nrm : 0.0;
  std::vector<double> out(v.begin(), v.end());
  for (double& x : out) x *= f;
  return out;
}

void threshold_stack_inplace(CoeffStack& u, double lambda, TvMode mode) {
  require_threshold(lambda, "threshold_stack");
  const std::size_t d = u.dims();
  const std::size_t n = u.block_size();
  const auto& k = kernels::active();
  if (mode == TvMode::anisotropic) {
    k.soft_threshold(u.dif(0).data(), d * n, lambda);
    return;
  }
  double* blocks[3] = {};
  for (std::size_t j = 0; j < d; ++j) blocks[j] = u.dif(j).data();
  k.group_soft_threshold(blocks, d, n, lambda);
}

CoeffStack threshold_stack(const CoeffStack& u, double lambda, TvMode mode) {
  CoeffStack out = u;
  threshold_stack_inplace(out, lambda, mode);
  return out;
}

NdSignal approx_prox(const NdSignal& z, const ProxParams& params) {
  CoeffStack u = w_forward(z);
  threshold_stack_inplace(u, params.threshold(z.dims()), params.mode());
  return w_adjoint(u);
}

}  // namespace tvprox
