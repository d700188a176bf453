#pragma once

#include <string_view>

#include "tvprox/haar_frame.hpp"
#include "tvprox/nd_signal.hpp"

namespace tvprox {

enum class TvMode { anisotropic, isotropic };

TvMode parse_tv_mode(std::string_view text);  // "aniso" | "iso" (long forms accepted)
std::string_view to_string(TvMode mode);

/// Anisotropic: sum_i sum_j |[D_j x]_i|. Isotropic: sum_i ||([D_1 x]_i, ..., [D_d x]_i)||_2.
double tv(const NdSignal& x, TvMode mode, Boundary boundary = Boundary::circular);

/// Group norm of a gradient field (same reduction as tv, without the differencing).
double group_norm(const GradientField& g, TvMode mode);

/// Lifted TV on frame coefficients: 2 sqrt(d) * ||u^dif||_{p,1}, so that
/// h_hat(W z) == tv(z).
double h_hat(const CoeffStack& u, TvMode mode);

/// A member of the subdifferential of h_hat at u: zero on the averaging
/// blocks; 2 sqrt(d) sign(u) (aniso) or 2 sqrt(d) g/||g|| per location group
/// (iso) on the difference blocks, with zero for zero entries/groups.
CoeffStack h_hat_subgradient(const CoeffStack& u, TvMode mode);

}  // namespace tvprox
