#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tvprox/exact_prox.hpp"
#include "tvprox/forward_models.hpp"
#include "tvprox/nd_signal.hpp"
#include "tvprox/tv_functional.hpp"

namespace tvprox {

/// The smooth data term g of f(x) = g(x) + lambda TV(x).
struct Problem {
  std::function<NdSignal(const NdSignal&)> grad_g;
  std::function<NdSignal(const NdSignal&, double)> prox_g;  ///< (v, gamma) -> prox_{gamma g}(v)
  std::function<double(const NdSignal&)> objective_g;
  std::optional<double> lipschitz_L;
};

/// g(x) = 1/2 ||y - x||^2, L = 1.
Problem denoise_problem(const NdSignal& y);
/// g(x) = 1/2 ||A x - y||^2 with prox by conjugate gradients. L is taken from
/// the operator's cached bound when present.
Problem least_squares_problem(const LinearOperator& op, const NdSignal& y, double cg_tol = 1e-10,
                              std::size_t cg_max = 200);

enum class ProxChoice { approximate, exact };
ProxChoice parse_prox_choice(std::string_view text);  // "approx" | "exact"
std::string_view to_string(ProxChoice choice);

struct SolverConfig {
  double gamma = 1.0;
  double lambda = 0.0;
  TvMode mode = TvMode::anisotropic;
  ProxChoice prox = ProxChoice::approximate;
  OracleConfig oracle;          ///< used when prox == exact
  bool warm_start_exact = true; ///< reuse the previous dual field across outer iterations
  double stop_tol = 5e-6;
  std::size_t max_iter = 20000;
  /// Every n-th prox application is checked for TV descent (0 disables).
  std::size_t descent_check_stride = 100;

  void validate() const;
};

enum class StopReason { tolerance_met, max_iter };
std::string_view to_string(StopReason reason);

struct RunReport {
  NdSignal final_x;
  std::vector<double> objective_trace;  ///< f after each iteration
  std::size_t iterations = 0;
  StopReason stop_reason = StopReason::max_iter;
  double wall_time = 0.0;  ///< seconds
  std::size_t descent_checks = 0;
  std::size_t descent_violations = 0;
  double primal_residual = 0.0;  ///< ADMM only: ||x - z|| at exit
  double dual_peak = 0.0;        ///< ADMM only: max ||s|| over the run
  std::vector<std::string> warnings;
};

/// (1 + sqrt(1 + 4 q^2)) / 2. Throws std::invalid_argument for q < 1.
double fista_momentum(double q_prev);

/// g(x) + lambda tv(x, mode).
double objective(const Problem& problem, const SolverConfig& cfg, const NdSignal& x);

/// Accelerated proximal gradient: z = s - gamma grad g(s), x = prox_{gamma lambda TV}(z),
/// s = x + (q_{k-1} - 1)/q_k (x - x_prev). Stops once the relative change of
/// x drops to stop_tol. Throws SolverAbort if an iterate turns non-finite.
RunReport apgm(const Problem& problem, const SolverConfig& cfg, const NdSignal& x0);

/// Scaled ADMM for min g(z) + lambda TV(x) s.t. z = x with penalty 1/gamma:
/// z = prox_{gamma g}(x - s), x = prox_{gamma lambda TV}(z + s), s += z - x.
RunReport admm(const Problem& problem, const SolverConfig& cfg, const NdSignal& x0);

}  // namespace tvprox
