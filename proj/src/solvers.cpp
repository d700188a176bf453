#include "tvprox/solvers.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "tvprox/error.hpp"
#include "tvprox/shrinkage.hpp"

namespace tvprox {

Problem denoise_problem(const NdSignal& y) {
  Problem p;
  p.grad_g = [y](const NdSignal& x) { return x - y; };
  p.prox_g = [y](const NdSignal& v, double gamma) { return prox_g_denoise(v, gamma, y); };
  p.objective_g = [y](const NdSignal& x) {
    const double r = l2_norm(x - y);
    return 0.5 * r * r;
  };
  p.lipschitz_L = 1.0;
  return p;
}

Problem least_squares_problem(const LinearOperator& op, const NdSignal& y, double cg_tol,
                              std::size_t cg_max) {
  if (y.shape() != op.out_shape())
    throw ShapeError("least_squares_problem: data " + shape_string(y.shape()) +
                     " does not match operator range " + shape_string(op.out_shape()));
  Problem p;
  p.grad_g = [op, y](const NdSignal& x) { return least_squares_gradient(op, x, y); };
  p.prox_g = [op, y, cg_tol, cg_max](const NdSignal& v, double gamma) {
    return prox_g_ct(v, gamma, y, op, cg_tol, cg_max).x;
  };
  p.objective_g = [op, y](const NdSignal& x) { return least_squares_value(op, x, y); };
  p.lipschitz_L = op.lipschitz_bound();
  return p;
}

ProxChoice parse_prox_choice(std::string_view text) {
  if (text == "approx" || text == "approximate") return ProxChoice::approximate;
  if (text == "exact") return ProxChoice::exact;
  throw ConfigError("unknown prox choice '" + std::string(text) + "' (expected approx|exact)");
}

std::string_view to_string(ProxChoice choice) {
  return choice == ProxChoice::approximate ? "approx" : "exact";
}

std::string_view to_string(StopReason reason) {
  return reason == StopReason::tolerance_met ? "tolerance-met" : "max-iter";
}

void SolverConfig::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("gamma must be positive and finite");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be >= 0 and finite");
  if (!(stop_tol > 0.0)) throw ConfigError("stop_tol must be positive");
  if (max_iter == 0) throw ConfigError("max_iter must be positive");
  if (prox == ProxChoice::exact) oracle.validate();
}

double fista_momentum(double q_prev) {
  if (!(q_prev >= 1.0)) throw std::invalid_argument("fista_momentum: q_prev must be >= 1");
  return (1.0 + std::sqrt(1.0 + 4.0 * q_prev * q_prev)) / 2.0;
}

double objective(const Problem& problem, const SolverConfig& cfg, const NdSignal& x) {
  const double g = problem.objective_g(x);
  return cfg.lambda == 0.0 ? g : g + cfg.lambda * tv(x, cfg.mode);
}

namespace {

using Clock = std::chrono::steady_clock;

// prox_{tau TV} by the configured method, with optional descent spot checks.
class TvProx {
 public:
  TvProx(const SolverConfig& cfg, RunReport& report) : cfg_(cfg), report_(report) {}

  NdSignal operator()(const NdSignal& z) {
    const double tau = cfg_.gamma * cfg_.lambda;
    if (tau == 0.0) return z;
    NdSignal x;
    if (cfg_.prox == ProxChoice::approximate) {
      x = approx_prox(z, ProxParams(tau, cfg_.mode));
    } else {
      const bool warm = cfg_.warm_start_exact && dual_.values().size() != 0;
      FpgResult r = fpg_solve(z, tau, cfg_.oracle, warm ? &dual_ : nullptr);
      if (cfg_.warm_start_exact) dual_ = std::move(r.dual);
      x = std::move(r.x);
    }
    ++calls_;
    if (cfg_.descent_check_stride != 0 && calls_ % cfg_.descent_check_stride == 1 % cfg_.descent_check_stride) {
      const double before = tv(z, cfg_.mode);
      const double after = tv(x, cfg_.mode);
      ++report_.descent_checks;
      if (after > before + 1e-10 * std::max(1.0, before)) ++report_.descent_violations;
    }
    return x;
  }

 private:
  const SolverConfig& cfg_;
  RunReport& report_;
  GradientField dual_;
  std::size_t calls_ = 0;
};

void require_finite_iterate(const NdSignal& x, double f, std::size_t k, const char* solver) {
  if (std::isfinite(f) && x.all_finite()) return;
  std::ostringstream msg;
  msg << solver << ": non-finite iterate at iteration " << k << " (objective " << f
      << "); the step size is probably too large";
  throw SolverAbort(msg.str());
}

// Relative change with a zero previous iterate treated as "not yet settled"
// unless the new iterate is zero as well.
bool settled(const NdSignal& x, const NdSignal& x_prev, double tol) {
  try {
    return rel_change(x, x_prev) <= tol;
  } catch (const ZeroDenominatorError&) {
    return l2_norm(x) == 0.0;
  }
}

void check_start(const NdSignal& x0, const char* solver) {
  if (x0.size() == 0) throw ShapeError(std::string(solver) + ": empty starting point");
  x0.require_finite(solver);
}

}  // namespace

RunReport apgm(const Problem& problem, const SolverConfig& cfg, const NdSignal& x0) {
  cfg.validate();
  check_start(x0, "apgm");
  const auto t0 = Clock::now();
  RunReport report;
  if (problem.lipschitz_L && cfg.gamma > 1.0 / *problem.lipschitz_L * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "gamma " << cfg.gamma << " exceeds 1/L = " << 1.0 / *problem.lipschitz_L;
    report.warnings.push_back(msg.str());
  }
  TvProx prox(cfg, report);

  NdSignal x_prev = x0;
  NdSignal s = x0;
  double q = 1.0;
  for (std::size_t k = 1; k <= cfg.max_iter; ++k) {
    const NdSignal z = axpby(1.0, s, -cfg.gamma, problem.grad_g(s));
    NdSignal x = prox(z);
    const double q_next = fista_momentum(q);
    s = axpby(1.0, x, (q - 1.0) / q_next, x - x_prev);
    q = q_next;

    const double f = objective(problem, cfg, x);
    require_finite_iterate(x, f, k, "apgm");
    report.objective_trace.push_back(f);
    report.iterations = k;

    const bool done = settled(x, x_prev, cfg.stop_tol);
    x_prev = std::move(x);
    if (done) {
      report.stop_reason = StopReason::tolerance_met;
      break;
    }
  }
  report.final_x = std::move(x_prev);
  report.wall_time = std::chrono::duration<double>(Clock::now() - t0).count();
  return report;
}

RunReport admm(const Problem& problem, const SolverConfig& cfg, const NdSignal& x0) {
  cfg.validate();
  check_start(x0, "admm");
  const auto t0 = Clock::now();
  RunReport report;
  TvProx prox(cfg, report);

  NdSignal x = x0;
  NdSignal s = NdSignal::zeros_like(x0);
  for (std::size_t k = 1; k <= cfg.max_iter; ++k) {
    const NdSignal z = problem.prox_g(x - s, cfg.gamma);
    NdSignal x_next = prox(z + s);
    s += z;
    s -= x_next;

    const double f = objective(problem, cfg, x_next);
    require_finite_iterate(x_next, f, k, "admm");
    report.objective_trace.push_back(f);
    report.iterations = k;
    report.primal_residual = l2_norm(x_next - z);
    report.dual_peak = std::max(report.dual_peak, l2_norm(s));

    const bool done = settled(x_next, x, cfg.stop_tol);
    x = std::move(x_next);
    if (done) {
      report.stop_reason = StopReason::tolerance_met;
      break;
    }
  }
  report.final_x = std::move(x);
  report.wall_time = std::chrono::duration<double>(Clock::now() - t0).count();
  return report;
}

}  // namespace tvprox
