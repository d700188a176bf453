#include "tvprox/tv_functional.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "tvprox/kernels.hpp"

namespace tvprox {
namespace {

double dif_norm(const CoeffStack& u, TvMode mode) {
  const std::size_t d = u.dims();
  const std::size_t n = u.block_size();
  const auto& k = kernels::active();
  if (mode == TvMode::anisotropic) return k.abs_sum(u.dif(0).data(), d * n);
  const double* blocks[3] = {};
  for (std::size_t j = 0; j < d; ++j) blocks[j] = u.dif(j).data();
  return k.group_norm_sum(blocks, d, n);
}

}  // namespace

TvMode parse_tv_mode(std::string_view text) {
  if (text == "aniso" || text == "anisotropic") return TvMode::anisotropic;
  if (text == "iso" || text == "isotropic") return TvMode::isotropic;
  throw std::invalid_argument("unknown TV mode '" + std::string(text) + "'");
}

std::string_view to_string(TvMode mode) {
  return mode == TvMode::anisotropic ? "aniso" : "iso";
}

double group_norm(const GradientField& g, TvMode mode) {
  const std::size_t d = g.dims();
  const std::size_t n = g.block_size();
  const auto& k = kernels::active();
  if (mode == TvMode::anisotropic) return k.abs_sum(g.values().data(), d * n);
  const double* blocks[3] = {};
  for (std::size_t j = 0; j < d; ++j) blocks[j] = g.block(j).data();
  return k.group_norm_sum(blocks, d, n);
}

double tv(const NdSignal& x, TvMode mode, Boundary boundary) {
  return group_norm(forward_differences(x, boundary), mode);
}

double h_hat(const CoeffStack& u, TvMode mode) {
  const double d = static_cast<double>(u.dims());
  return 2.0 * std::sqrt(d) * dif_norm(u, mode);
}

CoeffStack h_hat_subgradient(const CoeffStack& u, TvMode mode) {
  const std::size_t d = u.dims();
  const std::size_t n = u.block_size();
  const double c = 2.0 * std::sqrt(static_cast<double>(d));
  CoeffStack g(u.shape());
  if (mode == TvMode::anisotropic) {
    for (std::size_t j = 0; j < d; ++j) {
      const auto src = u.dif(j);
      auto dst = g.dif(j);
      for (std::size_t i = 0; i < n; ++i)
        dst[i] = src[i] > 0.0 ? c : (src[i] < 0.0 ? -c : 0.0);
    }
    return g;
  }
  for (std::size_t i = 0; i < n; ++i) {
    double sq = 0.0;
    for (std::size_t j = 0; j < d; ++j) sq += u.dif(j)[i] * u.dif(j)[i];
    if (sq == 0.0) continue;
    const double nrm = std::sqrt(sq);
    for (std::size_t j = 0; j < d; ++j) g.dif(j)[i] = c * u.dif(j)[i] / nrm;
  }
  return g;
}

}  // namespace tvprox
