#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "tvprox/exact_prox.hpp"
#include "tvprox/nd_signal.hpp"
#include "tvprox/solvers.hpp"
#include "tvprox/tv_functional.hpp"

namespace tvprox {

/// Piecewise-constant foam: a centred disk of value 1 on a 0 background, with
/// n_disks circular voids of random radius and value in [0, 1) painted over
/// it in sequence. Deterministic per seed. Requires size >= 16.
NdSignal gen_foam_phantom(std::size_t size, std::uint64_t seed, std::size_t n_disks = 30);

/// 10 log10(peak^2 n / ||x - ref||^2). Identical inputs give +infinity.
double psnr(const NdSignal& reference, const NdSignal& x, double peak = 1.0);

/// (f_hat - f_star) / f_star. Throws ZeroDenominatorError for f_star <= 0.
double cost_accuracy(double f_hat, double f_star);

enum class Task { denoise, ct };
enum class SolverKind { apgm, admm };
Task parse_task(std::string_view text);
SolverKind parse_solver(std::string_view text);
std::string_view to_string(Task task);
std::string_view to_string(SolverKind solver);

struct ExperimentConfig {
  Task task = Task::denoise;
  std::size_t image_size = 32;
  std::size_t n_phantoms = 3;
  std::size_t n_disks = 30;
  std::uint64_t seed = 0;
  TvMode mode = TvMode::anisotropic;
  std::vector<double> lambda_grid{0.5};
  /// Denoising and CT-ADMM: absolute values. CT-APGM: fractions of 1/L.
  std::vector<double> gamma_grid{1e-1, 1e-2, 1e-3};
  SolverKind solver = SolverKind::apgm;
  ProxChoice prox = ProxChoice::approximate;
  std::size_t n_angles = 15;
  double noise_sigma = 0.1;
  double stop_tol = 5e-6;
  std::size_t max_iter = 20000;

  /// Tight reference used for f*: exact prox to high accuracy.
  OracleConfig tight_oracle{100000, 1e-12};
  double tight_stop_tol = 1e-10;
  std::size_t tight_max_iter = 200000;
  /// Secondary baseline: the same solver and gamma with an exact prox capped
  /// at this many FPG iterations (0 disables).
  std::size_t capped_fpg_iters = 50;

  std::string output_dir;       ///< empty: no files written
  bool write_images = true;
  bool record_timing = true;    ///< false writes 0 in the seconds column
  std::size_t threads = 0;      ///< 0: hardware concurrency

  /// Desk-scale defaults for the task (noise level, grids, angles).
  static ExperimentConfig defaults(Task task);
  /// 10 phantoms, 45 angles.
  void apply_full_scale();
  void validate() const;
};

struct MetricsRow {
  double lambda = 0.0;
  double gamma = 0.0;            ///< grid value as configured
  double cost_accuracy = 0.0;    ///< averaged over phantoms; absolute gap when f* = 0
  double psnr_vs_tv = 0.0;
  double psnr_vs_gt = 0.0;
  double iterations = 0.0;
  double wall_time = 0.0;
  std::size_t runs = 0;
  std::size_t failed = 0;
  std::size_t tolerance_stops = 0;
  std::size_t descent_violations = 0;
};

struct SweepResult {
  std::vector<MetricsRow> rows;        ///< ordered by (lambda, gamma) as configured
  std::vector<MetricsRow> capped_rows;  ///< same layout, against the capped-FPG baseline
  std::vector<std::string> errors;     ///< one entry per aborted run
  bool any_failed() const noexcept { return !errors.empty(); }
};

inline constexpr std::string_view kTableHeader =
    "lambda,gamma,cost_acc,psnr_tv,psnr_gt,iters,seconds";

/// Runs every (lambda, gamma, phantom) cell with the configured solver and
/// prox, scores it against a tight exact-TV reference computed once per
/// (lambda, phantom), and writes table.csv, per-run traces and images under
/// output_dir. Aborted runs are reported in `errors` and excluded from the
/// averages; the sweep carries on.
SweepResult run_sweep(const ExperimentConfig& cfg);

void write_table(std::ostream& os, const std::vector<MetricsRow>& rows, bool record_timing);

/// Plain PGM (P2, 8-bit), min-max scaled; a constant image maps to 0.
void save_pgm(const std::string& path, const NdSignal& img);

}  // namespace tvprox
