#include "tvprox/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <thread>

#include "tvprox/error.hpp"
#include "tvprox/forward_models.hpp"

namespace tvprox {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

// Uniform in [0, 1) from the top 53 bits; identical on every standard library.
double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

NdSignal gen_foam_phantom(std::size_t size, std::uint64_t seed, std::size_t n_disks) {
  if (size < 16) throw ConfigError("gen_foam_phantom: size must be at least 16");
  std::mt19937_64 rng(seed);
  const double n = static_cast<double>(size);
  const double centre = (n - 1.0) / 2.0;
  const double outer = 0.45 * n;

  NdSignal img({size, size});
  auto paint = [&](double cy, double cx, double radius, double value) {
    for (std::size_t r = 0; r < size; ++r)
      for (std::size_t c = 0; c < size; ++c) {
        const double dy = static_cast<double>(r) - cy;
        const double dx = static_cast<double>(c) - cx;
        if (dy * dy + dx * dx <= radius * radius) img[r * size + c] = value;
      }
  };
  paint(centre, centre, outer, 1.0);
  for (std::size_t k = 0; k < n_disks; ++k) {
    const double radius = n * (0.03 + 0.09 * unit_uniform(rng));
    // Centre uniformly inside the outer disk, far enough in to keep the void inside.
    const double reach = std::max(0.0, outer - radius);
    const double rho = reach * std::sqrt(unit_uniform(rng));
    const double phi = 2.0 * std::numbers::pi * unit_uniform(rng);
    const double value = unit_uniform(rng);
    paint(centre + rho * std::sin(phi), centre + rho * std::cos(phi), radius, value);
  }
  return img;
}

double psnr(const NdSignal& reference, const NdSignal& x, double peak) {
  require_same_shape(reference, x, "psnr");
  const double err = l2_norm(x - reference);
  if (err == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak * static_cast<double>(x.size()) / (err * err));
}

double cost_accuracy(double f_hat, double f_star) {
  if (!(f_star > 0.0)) throw ZeroDenominatorError("cost_accuracy: f* must be positive");
  return (f_hat - f_star) / f_star;
}

Task parse_task(std::string_view text) {
  if (text == "denoise") return Task::denoise;
  if (text == "ct") return Task::ct;
  throw ConfigError("unknown task '" + std::string(text) + "' (expected denoise|ct)");
}

SolverKind parse_solver(std::string_view text) {
  if (text == "apgm") return SolverKind::apgm;
  if (text == "admm") return SolverKind::admm;
  throw ConfigError("unknown solver '" + std::string(text) + "' (expected apgm|admm)");
}

std::string_view to_string(Task task) { return task == Task::denoise ? "denoise" : "ct"; }
std::string_view to_string(SolverKind solver) { return solver == SolverKind::apgm ? "apgm" : "admm"; }

ExperimentConfig ExperimentConfig::defaults(Task task) {
  ExperimentConfig cfg;
  cfg.task = task;
  if (task == Task::ct) {
    cfg.solver = SolverKind::admm;
    cfg.noise_sigma = 0.5;
    cfg.lambda_grid = {2.5};
    cfg.gamma_grid = {1e-2, 1e-3, 1e-4};
  }
  return cfg;
}

void ExperimentConfig::apply_full_scale() {
  n_phantoms = 10;
  n_angles = 45;
}

void ExperimentConfig::validate() const {
  if (image_size < 16) throw ConfigError("image size must be at least 16");
  if (n_phantoms == 0) throw ConfigError("need at least one phantom");
  if (lambda_grid.empty()) throw ConfigError("lambda grid is empty");
  if (gamma_grid.empty()) throw ConfigError("gamma grid is empty");
  for (double l : lambda_grid)
    if (!(l >= 0.0) || !std::isfinite(l)) throw ConfigError("lambda values must be >= 0 and finite");
  for (double g : gamma_grid)
    if (!(g > 0.0) || !std::isfinite(g)) throw ConfigError("gamma values must be positive and finite");
  if (task == Task::ct && n_angles == 0) throw ConfigError("need at least one angle");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) throw ConfigError("noise sigma must be >= 0");
  if (!(stop_tol > 0.0) || !(tight_stop_tol > 0.0)) throw ConfigError("stop tolerances must be positive");
  if (max_iter == 0 || tight_max_iter == 0) throw ConfigError("iteration caps must be positive");
  tight_oracle.validate();
}

// ---------------------------------------------------------------------------

namespace {

struct Instance {
  NdSignal truth;
  NdSignal data;  // noisy image or sinogram
  Problem problem;
  NdSignal x0;
  double lipschitz = 1.0;
};

struct Reference {
  NdSignal x;
  double f = 0.0;
};

struct CellOutcome {
  bool ok = false;
  double cost = 0.0;
  double capped_cost = std::numeric_limits<double>::quiet_NaN();
  double psnr_tv = 0.0;
  double psnr_gt = 0.0;
  double iterations = 0.0;
  double seconds = 0.0;
  bool tolerance_stop = false;
  std::size_t descent_violations = 0;
};

double gap(double f_hat, double f_star) {
  return f_star > 0.0 ? cost_accuracy(f_hat, f_star) : f_hat - f_star;
}

class Sweep {
 public:
  explicit Sweep(const ExperimentConfig& cfg) : cfg_(cfg) {
    if (cfg_.task == Task::ct) {
      geo_ = CtGeometry::parallel(cfg_.image_size, cfg_.n_angles);
      op_.emplace(radon_operator(*geo_));
      const auto est = lipschitz_power_iter(*op_, 2000, 1e-10, derive_seed(cfg_.seed, 0xC0FFEE));
      op_->set_lipschitz_bound(est.estimate);
    }
  }

  Instance make_instance(std::size_t k) const {
    Instance inst;
    inst.truth = gen_foam_phantom(cfg_.image_size, derive_seed(cfg_.seed, 2 * k), cfg_.n_disks);
    const std::uint64_t noise_seed = derive_seed(cfg_.seed, 2 * k + 1);
    if (cfg_.task == Task::denoise) {
      inst.data = add_awgn(inst.truth, cfg_.noise_sigma, noise_seed);
      inst.problem = denoise_problem(inst.data);
      inst.x0 = inst.data;
      inst.lipschitz = 1.0;
    } else {
      inst.data = add_awgn(op_->apply(inst.truth), cfg_.noise_sigma, noise_seed);
      inst.problem = least_squares_problem(*op_, inst.data);
      inst.x0 = NdSignal::zeros_like(inst.truth);
      inst.lipschitz = *op_->lipschitz_bound();
    }
    return inst;
  }

  double step_for(double grid_gamma, const Instance& inst) const {
    if (cfg_.task == Task::ct && cfg_.solver == SolverKind::apgm) return grid_gamma / inst.lipschitz;
    return grid_gamma;
  }

  SolverConfig solver_config(double gamma, double lambda) const {
    SolverConfig sc;
    sc.gamma = gamma;
    sc.lambda = lambda;
    sc.mode = cfg_.mode;
    sc.prox = cfg_.prox;
    sc.stop_tol = cfg_.stop_tol;
    sc.max_iter = cfg_.max_iter;
    return sc;
  }

  RunReport run(const Instance& inst, const SolverConfig& sc) const {
    return cfg_.solver == SolverKind::apgm ? apgm(inst.problem, sc, inst.x0)
                                           : admm(inst.problem, sc, inst.x0);
  }

  Reference reference(const Instance& inst, double lambda) const {
    SolverConfig sc = solver_config(1.0, lambda);
    Reference ref;
    if (cfg_.task == Task::denoise) {
      OracleConfig oc = cfg_.tight_oracle;
      oc.mode = cfg_.mode;
      ref.x = lambda == 0.0 ? inst.data : fpg_solve(inst.data, lambda, oc).x;
    } else {
      sc.gamma = 1.0 / inst.lipschitz;
      sc.prox = ProxChoice::exact;
      sc.oracle = cfg_.tight_oracle;
      sc.oracle.mode = cfg_.mode;
      sc.stop_tol = cfg_.tight_stop_tol;
      sc.max_iter = cfg_.tight_max_iter;
      sc.descent_check_stride = 0;
      ref.x = apgm(inst.problem, sc, inst.x0).final_x;
    }
    ref.f = objective(inst.problem, sc, ref.x);
    return ref;
  }

  const ExperimentConfig& cfg() const { return cfg_; }

 private:
  const ExperimentConfig& cfg_;
  std::optional<CtGeometry> geo_;
  std::optional<LinearOperator> op_;
};

std::string fmt(const char* spec, double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

void save_trace(const std::string& path, const std::vector<double>& trace) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << "iteration,objective\n";
  for (std::size_t k = 0; k < trace.size(); ++k) os << k + 1 << ',' << fmt("%.17g", trace[k]) << '\n';
}

std::string tag(const char* prefix, std::size_t i) { return prefix + std::to_string(i); }

}  // namespace

void save_pgm(const std::string& path, const NdSignal& img) {
  if (img.dims() != 2) throw ShapeError("save_pgm: image must be 2-D");
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  const auto [lo_it, hi_it] = std::minmax_element(img.values().begin(), img.values().end());
  const double lo = *lo_it, span = *hi_it - *lo_it;
  const std::size_t rows = img.extent(0), cols = img.extent(1);
  os << "P2\n" << cols << ' ' << rows << "\n255\n";
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double v = span > 0.0 ? (img[r * cols + c] - lo) / span : 0.0;
      if (c) os << ' ';
      os << static_cast<int>(std::lround(255.0 * v));
    }
    os << '\n';
  }
}

void write_table(std::ostream& os, const std::vector<MetricsRow>& rows, bool record_timing) {
  os << kTableHeader << '\n';
  for (const auto& r : rows) {
    const bool empty = r.runs == r.failed;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    os << fmt("%.9g", r.lambda) << ',' << fmt("%.9g", r.gamma) << ','
       << fmt("%.6e", empty ? nan : r.cost_accuracy) << ',' << fmt("%.4f", empty ? nan : r.psnr_vs_tv)
       << ',' << fmt("%.4f", empty ? nan : r.psnr_vs_gt) << ',' << fmt("%.1f", empty ? nan : r.iterations)
       << ',' << fmt("%.3f", record_timing ? r.wall_time : 0.0) << '\n';
  }
}

SweepResult run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  namespace fs = std::filesystem;
  const bool files = !cfg.output_dir.empty();
  if (files) {
    fs::create_directories(fs::path(cfg.output_dir) / "runs");
    fs::create_directories(fs::path(cfg.output_dir) / "phantoms");
  }

  const Sweep sweep(cfg);
  const std::size_t nl = cfg.lambda_grid.size(), ng = cfg.gamma_grid.size(), np = cfg.n_phantoms;
  std::vector<CellOutcome> cells(nl * ng * np);
  std::vector<std::string> errors(nl * ng * np);
  auto cell_index = [&](std::size_t i, std::size_t j, std::size_t k) { return (i * ng + j) * np + k; };

  // One job per (lambda, phantom): the reference is shared by every gamma.
  auto job = [&](std::size_t i, std::size_t k) {
    const double lambda = cfg.lambda_grid[i];
    const Instance inst = sweep.make_instance(k);
    const fs::path root(cfg.output_dir);
    if (files && i == 0) {
      const std::string p = (root / "phantoms" / tag("p", k)).string();
      save_csv(p + "_truth.csv", inst.truth);
      if (cfg.write_images) save_pgm(p + "_truth.pgm", inst.truth);
      if (cfg.task == Task::ct) {
        save_sinogram_csv(p + "_sinogram.csv", inst.data);
      } else {
        save_csv(p + "_noisy.csv", inst.data);
        if (cfg.write_images) save_pgm(p + "_noisy.pgm", inst.data);
      }
    }

    std::optional<Reference> ref;
    std::string ref_error;
    try {
      ref = sweep.reference(inst, lambda);
    } catch (const SolverAbort& e) {
      ref_error = std::string("reference: ") + e.what();
    }
    if (ref && files) {
      const std::string p = (root / "phantoms" / (tag("l", i) + "_" + tag("p", k))).string();
      save_csv(p + "_reference.csv", ref->x);
      if (cfg.write_images) save_pgm(p + "_reference.pgm", ref->x);
    }

    for (std::size_t j = 0; j < ng; ++j) {
      const std::size_t idx = cell_index(i, j, k);
      if (!ref) {
        errors[idx] = ref_error;
        continue;
      }
      const SolverConfig sc = sweep.solver_config(sweep.step_for(cfg.gamma_grid[j], inst), lambda);
      CellOutcome& out = cells[idx];
      try {
        const RunReport rep = sweep.run(inst, sc);
        const double f_hat = objective(inst.problem, sc, rep.final_x);
        out.cost = gap(f_hat, ref->f);
        out.psnr_tv = psnr(ref->x, rep.final_x);
        out.psnr_gt = psnr(inst.truth, rep.final_x);
        out.iterations = static_cast<double>(rep.iterations);
        out.seconds = rep.wall_time;
        out.tolerance_stop = rep.stop_reason == StopReason::tolerance_met;
        out.descent_violations = rep.descent_violations;
        if (cfg.capped_fpg_iters > 0) {
          SolverConfig pc = sc;
          pc.prox = ProxChoice::exact;
          pc.oracle = OracleConfig{cfg.capped_fpg_iters, std::numeric_limits<double>::min(), cfg.mode};
          pc.descent_check_stride = 0;
          const RunReport base = sweep.run(inst, pc);
          out.capped_cost = gap(f_hat, objective(inst.problem, pc, base.final_x));
        }
        out.ok = true;
        if (files) {
          const fs::path dir = root / "runs" / (tag("l", i) + "_" + tag("g", j) + "_" + tag("p", k));
          fs::create_directories(dir);
          save_trace((dir / "trace.csv").string(), rep.objective_trace);
          save_csv((dir / "recon.csv").string(), rep.final_x);
          if (cfg.write_images) {
            save_pgm((dir / "recon.pgm").string(), rep.final_x);
            save_pgm((dir / "diff.pgm").string(), rep.final_x - ref->x);
          }
        }
      } catch (const SolverAbort& e) {
        out = CellOutcome{};
        errors[idx] = e.what();
      }
    }
  };

  const std::size_t n_jobs = nl * np;
  std::size_t n_threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min(n_threads, n_jobs);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> workers;
    for (std::size_t t = 0; t < n_threads; ++t)
      workers.emplace_back([&] {
        for (std::size_t q; (q = next.fetch_add(1)) < n_jobs;) {
          try {
            job(q / np, q % np);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = n_jobs;
          }
        }
      });
  }
  if (failure) std::rethrow_exception(failure);

  SweepResult result;
  for (std::size_t i = 0; i < nl; ++i)
    for (std::size_t j = 0; j < ng; ++j) {
      MetricsRow row{.lambda = cfg.lambda_grid[i], .gamma = cfg.gamma_grid[j]};
      MetricsRow capped = row;
      std::size_t ok = 0;
      for (std::size_t k = 0; k < np; ++k) {
        const std::size_t idx = cell_index(i, j, k);
        ++row.runs;
        if (!errors[idx].empty()) {
          ++row.failed;
          result.errors.push_back(tag("lambda=", i) + " " + tag("gamma=", j) + " " + tag("phantom=", k) +
                                  ": " + errors[idx]);
          continue;
        }
        const CellOutcome& c = cells[idx];
        ++ok;
        row.cost_accuracy += c.cost;
        row.psnr_vs_tv += c.psnr_tv;
        row.psnr_vs_gt += c.psnr_gt;
        row.iterations += c.iterations;
        row.wall_time += c.seconds;
        row.tolerance_stops += c.tolerance_stop ? 1 : 0;
        row.descent_violations += c.descent_violations;
        capped.cost_accuracy += c.capped_cost;
      }
      if (ok > 0) {
        const double inv = 1.0 / static_cast<double>(ok);
        row.cost_accuracy *= inv;
        row.psnr_vs_tv *= inv;
        row.psnr_vs_gt *= inv;
        row.iterations *= inv;
        row.wall_time *= inv;
        capped.cost_accuracy *= inv;
      }
      capped.psnr_vs_tv = row.psnr_vs_tv;
      capped.psnr_vs_gt = row.psnr_vs_gt;
      capped.iterations = row.iterations;
      capped.wall_time = row.wall_time;
      capped.runs = row.runs;
      capped.failed = row.failed;
      capped.tolerance_stops = row.tolerance_stops;
      result.rows.push_back(row);
      result.capped_rows.push_back(capped);
    }

  if (files) {
    const fs::path root(cfg.output_dir);
    std::ofstream table(root / "table.csv");
    write_table(table, result.rows, cfg.record_timing);
    if (cfg.capped_fpg_iters > 0) {
      std::ofstream capped(root / ("table_fpg" + std::to_string(cfg.capped_fpg_iters) + ".csv"));
      write_table(capped, result.capped_rows, cfg.record_timing);
    }
  }
  return result;
}

}  // namespace tvprox
