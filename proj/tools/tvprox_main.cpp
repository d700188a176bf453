#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli_args.hpp"
#include "tvprox/error.hpp"
#include "tvprox/exact_prox.hpp"
#include "tvprox/experiments.hpp"
#include "tvprox/kernels.hpp"
#include "tvprox/shrinkage.hpp"

namespace {

using namespace tvprox;

constexpr int kConfigError = 2;
constexpr int kSolverAbort = 3;

struct SweepArgs {
  std::string lambda, gamma, mode, solver, prox, out;
  std::size_t size = 0, phantoms = 0, angles = 0, threads = 0, max_iter = 0, fpg_iters = 0;
  std::uint64_t seed = 0;
  double sigma = 0.0, stop_tol = 0.0;
  bool full_scale = false, no_timing = false, no_images = false;
};

struct Opts {
  CLI::Option* lambda;
  CLI::Option* gamma;
  CLI::Option* mode;
  CLI::Option* solver;
  CLI::Option* prox;
  CLI::Option* size;
  CLI::Option* phantoms;
  CLI::Option* angles;
  CLI::Option* threads;
  CLI::Option* max_iter;
  CLI::Option* fpg_iters;
  CLI::Option* sigma;
  CLI::Option* stop_tol;
};

Opts add_sweep_options(CLI::App* sub, SweepArgs& a, bool ct) {
  Opts o{};
  o.lambda = sub->add_option("--lambda", a.lambda, "regularization weights, comma separated");
  o.gamma = sub->add_option("--gamma", a.gamma,
                            ct ? "step sizes (APGM: fractions of 1/L) or ADMM penalties, comma separated"
                               : "step sizes, comma separated");
  o.mode = sub->add_option("--mode", a.mode, "TV flavour")->check(CLI::IsMember({"aniso", "iso"}));
  o.solver = sub->add_option("--solver", a.solver, "outer solver")->check(CLI::IsMember({"apgm", "admm"}));
  o.prox = sub->add_option("--prox", a.prox, "TV prox used by the solver")
               ->check(CLI::IsMember({"approx", "exact"}));
  o.size = sub->add_option("--size", a.size, "image side in pixels (>= 16)");
  o.phantoms = sub->add_option("--phantoms", a.phantoms, "number of phantoms averaged per row");
  sub->add_option("--seed", a.seed, "master seed");
  o.angles = ct ? sub->add_option("--angles", a.angles, "number of projection angles") : nullptr;
  o.sigma = sub->add_option("--sigma", a.sigma, "noise standard deviation");
  o.stop_tol = sub->add_option("--stop-tol", a.stop_tol, "relative-change stopping tolerance");
  o.max_iter = sub->add_option("--max-iter", a.max_iter, "outer iteration cap");
  o.fpg_iters = sub->add_option("--fpg-iters", a.fpg_iters,
                                "FPG iterations for the capped exact baseline (0 disables)");
  o.threads = sub->add_option("--threads", a.threads, "worker threads (0: all cores)");
  sub->add_option("--out", a.out, "output directory for table.csv, traces and images");
  sub->add_flag("--paper-scale", a.full_scale, "10 phantoms and 45 angles");
  sub->add_flag("--no-timing", a.no_timing, "write 0 in the seconds column (byte-stable output)");
  sub->add_flag("--no-images", a.no_images, "skip PGM output");
  return o;
}

ExperimentConfig build_config(Task task, const SweepArgs& a, const Opts& o) {
  ExperimentConfig cfg = ExperimentConfig::defaults(task);
  if (a.full_scale) cfg.apply_full_scale();
  if (o.lambda->count()) cfg.lambda_grid = cli::parse_list(a.lambda, "--lambda");
  if (o.gamma->count()) cfg.gamma_grid = cli::parse_list(a.gamma, "--gamma");
  if (o.mode->count()) cfg.mode = parse_tv_mode(a.mode);
  if (o.solver->count()) cfg.solver = parse_solver(a.solver);
  if (o.prox->count()) cfg.prox = parse_prox_choice(a.prox);
  if (o.size->count()) cfg.image_size = a.size;
  if (o.phantoms->count()) cfg.n_phantoms = a.phantoms;
  if (o.angles && o.angles->count()) cfg.n_angles = a.angles;
  if (o.sigma->count()) cfg.noise_sigma = a.sigma;
  if (o.stop_tol->count()) cfg.stop_tol = a.stop_tol;
  if (o.max_iter->count()) cfg.max_iter = a.max_iter;
  if (o.fpg_iters->count()) cfg.capped_fpg_iters = a.fpg_iters;
  if (o.threads->count()) cfg.threads = a.threads;
  cfg.seed = a.seed;
  cfg.output_dir = a.out;
  cfg.record_timing = !a.no_timing;
  cfg.write_images = !a.no_images;
  cfg.validate();
  return cfg;
}

int run_sweep_command(const ExperimentConfig& cfg) {
  const SweepResult res = run_sweep(cfg);
  write_table(std::cout, res.rows, cfg.record_timing);
  std::size_t violations = 0;
  for (const auto& r : res.rows) violations += r.descent_violations;
  if (violations > 0) std::cerr << "warning: " << violations << " TV-descent check(s) failed\n";
  for (const auto& e : res.errors) std::cerr << "aborted: " << e << '\n';
  return res.any_failed() ? kSolverAbort : 0;
}

struct ProxCheckArgs {
  std::string tau = "0.001,0.01,0.1", mode = "aniso", input;
  std::size_t size = 16, dims = 2, fpg_iters = 20000;
  std::uint64_t seed = 0;
};

int run_prox_check(const ProxCheckArgs& a) {
  const std::vector<double> taus = cli::parse_list(a.tau, "--tau");
  const TvMode mode = parse_tv_mode(a.mode);
  NdSignal z;
  if (!a.input.empty()) {
    z = load_csv(a.input);
  } else {
    if (a.dims < 1 || a.dims > 3) throw ConfigError("--dims must be 1, 2 or 3");
    z = NdSignal(NdSignal::Shape(a.dims, a.size));
    std::mt19937_64 rng(a.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (double& v : z.values()) v = gauss(rng);
  }
  const double d = static_cast<double>(z.dims());
  const double n = static_cast<double>(z.size());
  OracleConfig oc{a.fpg_iters, 1e-10, mode};

  std::printf("tau,mode,dist_exact,bound,tv_input,tv_approx,tv_exact,residual_exact,fpg_iters\n");
  for (double tau : taus) {
    const NdSignal s = approx_prox(z, ProxParams(tau, mode));
    const FpgResult ex = fpg_solve(z, tau, oc);
    std::printf("%.9g,%s,%.6e,%.6e,%.9g,%.9g,%.9g,%.3e,%zu\n", tau, std::string(to_string(mode)).c_str(),
                l2_norm(s - ex.x), 4.0 * tau * d * std::sqrt(n), tv(z, mode), tv(s, mode),
                tv(ex.x, mode), prox_residual(z, ex.x, tau, mode), ex.iterations);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  try {
    args = cli::expand_config(args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }

  CLI::App app{"Approximate and exact total-variation proximal operators: experiments and checks"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.add_option("--config", "key=value file mirroring the flags; flags on the command line win");
  std::string kernels = "auto";
  app.add_option("--kernels", kernels, "kernel set: auto, scalar or avx2")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}));

  SweepArgs dn_args, ct_args;
  auto* dn = app.add_subcommand("denoise", "TV denoising sweep over (lambda, gamma)");
  const Opts dn_opts = add_sweep_options(dn, dn_args, false);
  auto* ct = app.add_subcommand("ct", "limited-angle parallel-beam CT sweep over (lambda, gamma)");
  const Opts ct_opts = add_sweep_options(ct, ct_args, true);

  ProxCheckArgs pc_args;
  auto* pc = app.add_subcommand("prox-check", "compare the approximate prox with the exact one");
  pc->add_option("--tau", pc_args.tau, "prox scales, comma separated");
  pc->add_option("--mode", pc_args.mode, "TV flavour")->check(CLI::IsMember({"aniso", "iso"}));
  pc->add_option("--size", pc_args.size, "extent of each axis of the random signal");
  pc->add_option("--dims", pc_args.dims, "dimensionality of the random signal (1-3)");
  pc->add_option("--seed", pc_args.seed, "seed of the random signal");
  pc->add_option("--input", pc_args.input, "CSV signal to use instead of a random one");
  pc->add_option("--fpg-iters", pc_args.fpg_iters, "iteration cap of the exact prox");

  std::vector<char*> cargv;
  for (auto& s : args) cargv.push_back(s.data());
  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    kernels::select(kernels);
    if (*dn) return run_sweep_command(build_config(Task::denoise, dn_args, dn_opts));
    if (*ct) return run_sweep_command(build_config(Task::ct, ct_args, ct_opts));
    return run_prox_check(pc_args);
  } catch (const SolverAbort& e) {
    std::cerr << "solver aborted: " << e.what() << '\n';
    return kSolverAbort;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
