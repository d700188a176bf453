#pragma once

#include <cstddef>

#include "tvprox/haar_frame.hpp"
#include "tvprox/nd_signal.hpp"
#include "tvprox/tv_functional.hpp"

namespace tvprox {

struct OracleConfig {
  std::size_t max_iter = 500;
  /// Stop once the duality gap falls below tol * max(1, primal objective).
  double tol = 1e-10;
  TvMode mode = TvMode::anisotropic;
  Boundary boundary = Boundary::circular;

  void validate() const;
};

struct FpgResult {
  NdSignal x;
  GradientField dual;  ///< final dual field, feasible: |p| <= 1 entrywise (aniso) or per group (iso)
  double gap = 0.0;    ///< tau * (TV(x) - <D x, p>) >= 0, with x = z - tau D^T p
  std::size_t iterations = 0;
  bool converged = false;
};

/// Dual fast projected gradient for prox_{tau TV}(z): iterates on the dual
/// field p (one component per axis and sample), step 1/(4 d tau), with
/// accelerated momentum and no restart. The dual starts at zero unless a warm
/// start is supplied. Running out of iterations is not an error; check
/// `converged` and `gap`.
FpgResult fpg_solve(const NdSignal& z, double tau, const OracleConfig& cfg,
                    const GradientField* warm_start = nullptr);

/// Convenience wrapper returning only the primal solution.
NdSignal fpg_prox(const NdSignal& z, double tau, const OracleConfig& cfg);

/// Exact 1D TV prox with free-boundary differences (direct taut-string
/// method, linear time in practice).
NdSignal tautstring_prox_1d(const NdSignal& z, double tau);

/// 1/2 ||x - z||^2 + tau TV(x).
double prox_objective(const NdSignal& z, const NdSignal& x, double tau, TvMode mode,
                      Boundary boundary = Boundary::circular);

/// Optimality residual of x for prox_{tau TV}(z), in signal units; zero
/// exactly when x is the prox. Two certificates are tried and the smaller is
/// returned:
///  1. the distance from z - x to tau * dTV(x), with the dual field fixed to
///     the unit normal wherever x has a jump and fitted within the unit ball
///     where x is flat;
///  2. tau * min_p sqrt(||(z - x)/tau - D^T p||^2 + 2 (TV(x) - <D x, p>)/tau)
///     over dual-feasible p, warm-started from the first fit.
/// The fits run projected accelerated gradient to stagnation, so the value is
/// an upper bound on each certificate's exact minimum. For isotropic TV the
/// residual of an iterative solution scales like the square root of its
/// duality gap.
double prox_residual(const NdSignal& z, const NdSignal& x, double tau, TvMode mode,
                     Boundary boundary = Boundary::circular);

}  // namespace tvprox
