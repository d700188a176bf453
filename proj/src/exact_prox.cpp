#include "tvprox/exact_prox.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tvprox/error.hpp"
#include "tvprox/kernels.hpp"

namespace tvprox {
namespace {

constexpr std::size_t kGapCheckEvery = 5;

void project_dual(GradientField& p, TvMode mode, Boundary boundary) {
  const auto& k = kernels::active();
  const std::size_t d = p.dims();
  const std::size_t n = p.block_size();
  if (mode == TvMode::anisotropic) {
    k.clamp_unit(p.values().data(), d * n);
  } else {
    double* blocks[3] = {};
    for (std::size_t j = 0; j < d; ++j) blocks[j] = p.block(j).data();
    k.project_unit_groups(blocks, d, n);
  }
  if (boundary == Boundary::free) mask_free_boundary(p);
}

// x = z - tau D^T p.
void primal_from_dual(const NdSignal& z, const GradientField& p, double tau, Boundary boundary,
                      NdSignal& x) {
  x = z;
  accumulate_difference_adjoint(p, boundary, x, -tau);
}

void check_tau(double tau, const char* what) {
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw std::invalid_argument(std::string(what) + ": tau must be finite and > 0");
}

}  // namespace

void OracleConfig::validate() const {
  if (max_iter < 1) throw ConfigError("OracleConfig: max_iter must be >= 1");
  if (!(tol > 0.0)) throw ConfigError("OracleConfig: tol must be > 0");
}

double prox_objective(const NdSignal& z, const NdSignal& x, double tau, TvMode mode,
                      Boundary boundary) {
  const NdSignal r = x - z;
  return 0.5 * dot(r, r) + tau * tv(x, mode, boundary);
}

FpgResult fpg_solve(const NdSignal& z, double tau, const OracleConfig& cfg,
                    const GradientField* warm_start) {
  cfg.validate();
  check_tau(tau, "fpg_solve");
  require_frame_shape(z, "fpg_solve");

  const auto& k = kernels::active();
  const std::size_t d = z.dims();
  const std::size_t len = d * z.size();
  const double step = 1.0 / (4.0 * static_cast<double>(d) * tau);

  GradientField p(z.shape());
  if (warm_start != nullptr) {
    if (warm_start->shape() != z.shape()) throw ShapeError("fpg_solve: warm start shape mismatch");
    p = *warm_start;
    project_dual(p, cfg.mode, cfg.boundary);
  }
  GradientField r = p;
  GradientField p_next(z.shape());
  GradientField dx(z.shape());
  NdSignal x = z;
  double t = 1.0;

  FpgResult res;
  for (std::size_t it = 1; it <= cfg.max_iter; ++it) {
    primal_from_dual(z, r, tau, cfg.boundary, x);
    forward_differences(x, cfg.boundary, dx, step);
    k.axpby(1.0, r.values().data(), 1.0, dx.values().data(), p_next.values().data(), len);
    project_dual(p_next, cfg.mode, cfg.boundary);

    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double beta = (t - 1.0) / t_next;
    k.axpby(1.0 + beta, p_next.values().data(), -beta, p.values().data(), r.values().data(), len);
    std::swap(p, p_next);
    t = t_next;
    res.iterations = it;

    if (it % kGapCheckEvery == 0 || it == cfg.max_iter) {
      primal_from_dual(z, p, tau, cfg.boundary, x);
      forward_differences(x, cfg.boundary, dx);
      const double tv_x = group_norm(dx, cfg.mode);
      res.gap = tau * (tv_x - k.dot(dx.values().data(), p.values().data(), len));
      const NdSignal diff = x - z;
      const double primal = 0.5 * dot(diff, diff) + tau * tv_x;
      if (!std::isfinite(res.gap)) throw SolverAbort("fpg_solve: non-finite duality gap");
      if (res.gap <= cfg.tol * std::max(1.0, primal)) {
        res.converged = true;
        break;
      }
    }
  }
  primal_from_dual(z, p, tau, cfg.boundary, x);
  res.x = std::move(x);
  res.dual = std::move(p);
  return res;
}

NdSignal fpg_prox(const NdSignal& z, double tau, const OracleConfig& cfg) {
  return fpg_solve(z, tau, cfg).x;
}

double prox_residual(const NdSignal& z, const NdSignal& x, double tau, TvMode mode,
                     Boundary boundary) {
  require_same_shape(z, x, "prox_residual");
  check_tau(tau, "prox_residual");
  require_frame_shape(x, "prox_residual");

  const auto& k = kernels::active();
  const std::size_t d = x.dims();
  const std::size_t n = x.size();
  const std::size_t len = d * n;

  double scale = 1.0;
  for (double v : x.values()) scale = std::max(scale, std::fabs(v));
  const double flat_tol = 1e-9 * scale;

  // Dual entries pinned by the subdifferential where x has a jump; `free_mask`
  // marks entries that may range over the unit ball.
  const GradientField g = forward_differences(x, boundary);
  GradientField fixed(x.shape());
  std::vector<unsigned char> free_mask(len, 0);
  if (mode == TvMode::anisotropic) {
    const auto gv = g.values();
    auto fv = fixed.values();
    for (std::size_t i = 0; i < len; ++i) {
      if (std::fabs(gv[i]) <= flat_tol)
        free_mask[i] = 1;
      else
        fv[i] = gv[i] > 0.0 ? 1.0 : -1.0;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      double sq = 0.0;
      for (std::size_t j = 0; j < d; ++j) sq += g.block(j)[i] * g.block(j)[i];
      const double nrm = std::sqrt(sq);
      for (std::size_t j = 0; j < d; ++j) {
        if (nrm <= flat_tol)
          free_mask[j * n + i] = 1;
        else
          fixed.block(j)[i] = g.block(j)[i] / nrm;
      }
    }
  }
  if (boundary == Boundary::free) {
    // Entries across the open boundary carry no constraint and no effect.
    mask_free_boundary(fixed);
    GradientField live(x.shape());
    for (double& v : live.values()) v = 1.0;
    mask_free_boundary(live);
    for (std::size_t i = 0; i < len; ++i)
      if (live.values()[i] == 0.0) free_mask[i] = 0;
  }

  // target = (z - x)/tau - D^T fixed; fit D^T q to it with q on the free set.
  NdSignal target = axpby(1.0 / tau, z, -1.0 / tau, x);
  accumulate_difference_adjoint(fixed, boundary, target, -1.0);

  bool any_free = false;
  for (unsigned char m : free_mask) any_free = any_free || m;
  const double target_norm = l2_norm(target);
  double best = target_norm;
  if (best == 0.0) return 0.0;

  const double step = 1.0 / (4.0 * static_cast<double>(d));
  std::vector<unsigned char> live_mask(len, 1);
  if (boundary == Boundary::free) {
    GradientField live(x.shape());
    for (double& v : live.values()) v = 1.0;
    mask_free_boundary(live);
    for (std::size_t i = 0; i < len; ++i) live_mask[i] = live.values()[i] != 0.0;
  }
  auto project = [&](GradientField& q, const std::vector<unsigned char>& mask) {
    auto qv = q.values();
    for (std::size_t i = 0; i < len; ++i)
      if (!mask[i]) qv[i] = 0.0;
    if (mode == TvMode::anisotropic) {
      k.clamp_unit(qv.data(), len);
    } else {
      double* blocks[3] = {};
      for (std::size_t j = 0; j < d; ++j) blocks[j] = q.block(j).data();
      k.project_unit_groups(blocks, d, n);
    }
  };

  // Projected accelerated gradient on a smooth convex objective of the dual
  // field; `value` returns the objective, `gradient` writes its gradient at y.
  // Stops on stagnation and returns the best value seen; q ends at its argmin.
  auto minimize = [&](GradientField& q, const std::vector<unsigned char>& mask, auto&& value,
                      auto&& gradient) {
    GradientField q_next(x.shape()), y = q, grad(x.shape()), q_best = q;
    double t = 1.0;
    double v_best = value(q);
    double window_best = v_best;
    constexpr std::size_t kMaxIter = 20000;
    constexpr std::size_t kWindow = 200;
    for (std::size_t it = 1; it <= kMaxIter; ++it) {
      gradient(y, grad);
      k.axpby(1.0, y.values().data(), -step, grad.values().data(), q_next.values().data(), len);
      project(q_next, mask);

      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      const double beta = (t - 1.0) / t_next;
      k.axpby(1.0 + beta, q_next.values().data(), -beta, q.values().data(), y.values().data(), len);
      std::swap(q, q_next);
      t = t_next;

      if (it % 10 == 0) {
        const double v = value(q);
        if (v < v_best) {
          v_best = v;
          q_best = q;
        }
        if (v_best <= 1e-30 * (1.0 + target_norm * target_norm)) break;
        if (it % kWindow == 0) {
          if (v_best > 0.998 * window_best) break;
          window_best = v_best;
        }
      }
    }
    q = std::move(q_best);
    return v_best;
  };

  // Stage 1: dual pinned to the unit normal on jumps, free where x is flat.
  // Minimizes 1/2 ||D^T q - target||^2 over the free entries.
  NdSignal resid = NdSignal::zeros_like(x);
  auto misfit = [&](const GradientField& q, const NdSignal& tgt) {
    resid = tgt;
    resid *= -1.0;
    accumulate_difference_adjoint(q, boundary, resid, 1.0);
    return resid;
  };
  GradientField q(x.shape());
  if (any_free) {
    const double v = minimize(
        q, free_mask, [&](const GradientField& p) { return 0.5 * dot(misfit(p, target), resid); },
        [&](const GradientField& p, GradientField& grad) {
          forward_differences(misfit(p, target), boundary, grad);
        });
    best = std::min(best, std::sqrt(2.0 * v));
  }

  // Stage 2: every entry free, with the complementarity slack priced in:
  //   1/2 ||(z - x)/tau - D^T p||^2 + (TV(x) - <D x, p>)/tau.
  // This vanishes only at the prox as well, and unlike stage 1 it does not
  // jump when a small spurious gradient of x points the wrong way.
  k.axpby(1.0, fixed.values().data(), 1.0, q.values().data(), q.values().data(), len);
  const NdSignal base = axpby(1.0 / tau, z, -1.0 / tau, x);
  const double tv_x = group_norm(g, mode) / tau;
  const double v2 = minimize(
      q, live_mask,
      [&](const GradientField& p) {
        const double fit = 0.5 * dot(misfit(p, base), resid);
        return fit + std::max(0.0, tv_x - k.dot(g.values().data(), p.values().data(), len) / tau);
      },
      [&](const GradientField& p, GradientField& grad) {
        forward_differences(misfit(p, base), boundary, grad);
        k.axpby(1.0, grad.values().data(), -1.0 / tau, g.values().data(), grad.values().data(), len);
      });
  best = std::min(best, std::sqrt(2.0 * v2));
  return tau * best;
}

}  // namespace tvprox
