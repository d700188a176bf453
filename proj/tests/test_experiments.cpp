#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "support.hpp"
#include "tvprox/error.hpp"
#include "tvprox/experiments.hpp"

using namespace tvprox;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("tvprox_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("foam phantom") {
  const auto a = gen_foam_phantom(32, 7);
  CHECK(a == gen_foam_phantom(32, 7));
  CHECK(a != gen_foam_phantom(32, 8));
  std::set<double> distinct;
  for (double v : a.values()) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    distinct.insert(v);
  }
  CHECK(distinct.size() <= 30 + 2);
  CHECK(distinct.size() >= 3);
  CHECK(tv(a, TvMode::anisotropic) > 0.0);
  CHECK_THROWS_AS(gen_foam_phantom(15, 1), ConfigError);
  const auto few = gen_foam_phantom(16, 1, 2);
  std::set<double> v2(few.values().begin(), few.values().end());
  CHECK(v2.size() <= 4);
}

TEST_CASE("psnr") {
  std::mt19937_64 rng(81);
  const auto x = testing::random_signal({5, 5}, rng);
  CHECK(std::isinf(psnr(x, x)));
  CHECK(psnr(NdSignal({1}, {0.0}), NdSignal({1}, {0.1}), 1.0) == doctest::Approx(20.0).epsilon(1e-12));
  const auto y = testing::random_signal({5, 5}, rng);
  double mse = 0.0;
  for (std::size_t i = 0; i < 25; ++i) mse += (x[i] - y[i]) * (x[i] - y[i]);
  mse /= 25.0;
  CHECK(std::fabs(psnr(x, y, 2.0) - 10.0 * std::log10(4.0 / mse)) <= 1e-10);
}

TEST_CASE("cost accuracy") {
  CHECK(cost_accuracy(3.0, 3.0) == 0.0);
  CHECK(cost_accuracy(1.1 * 2.0, 2.0) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK_THROWS_AS(cost_accuracy(1.0, 0.0), ZeroDenominatorError);
  CHECK_THROWS_AS(cost_accuracy(1.0, -1.0), ZeroDenominatorError);
  const double f_star = 123.456;
  const double acc = cost_accuracy(f_star * (1 + 1.157e-03), f_star);
  CHECK(acc == doctest::Approx(1.157e-03).epsilon(1e-9));
}

TEST_CASE("name parsing") {
  CHECK(parse_task("ct") == Task::ct);
  CHECK(parse_solver("admm") == SolverKind::admm);
  CHECK_THROWS_AS(parse_task("deblur"), ConfigError);
  CHECK_THROWS_AS(parse_solver("pdhg"), ConfigError);
}

TEST_CASE("configuration validation") {
  auto cfg = ExperimentConfig::defaults(Task::denoise);
  CHECK_NOTHROW(cfg.validate());
  cfg.gamma_grid.clear();
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = ExperimentConfig::defaults(Task::ct);
  CHECK(cfg.noise_sigma == 0.5);
  cfg.apply_full_scale();
  CHECK(cfg.n_phantoms == 10);
  CHECK(cfg.n_angles == 45);
  cfg.image_size = 8;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("table formatting") {
  MetricsRow r{.lambda = 0.5, .gamma = 0.01, .cost_accuracy = 0.0123, .psnr_vs_tv = INFINITY,
               .psnr_vs_gt = 21.5, .iterations = 12, .wall_time = 1.25, .runs = 1};
  std::ostringstream on, off;
  write_table(on, {r}, true);
  write_table(off, {r}, false);
  CHECK(on.str() == "lambda,gamma,cost_acc,psnr_tv,psnr_gt,iters,seconds\n"
                    "0.5,0.01,1.230000e-02,inf,21.5000,12.0,1.250\n");
  CHECK(off.str().substr(off.str().rfind(',')) == ",0.000\n");
}

TEST_CASE("sweep without regularization is exact") {
  auto cfg = ExperimentConfig::defaults(Task::denoise);
  cfg.image_size = 16;
  cfg.n_phantoms = 2;
  cfg.lambda_grid = {0.0};
  cfg.capped_fpg_iters = 0;
  const auto res = run_sweep(cfg);
  REQUIRE(res.rows.size() == 3);
  for (const auto& r : res.rows) {
    CHECK(std::fabs(r.cost_accuracy) <= 1e-10);
    CHECK(r.tolerance_stops == r.runs);
  }
}

TEST_CASE("denoising sweep writes artifacts and is reproducible") {
  const auto dir = scratch_dir("sweep");
  auto cfg = ExperimentConfig::defaults(Task::denoise);
  cfg.image_size = 16;
  cfg.n_phantoms = 2;
  cfg.lambda_grid = {0.3, 0.6};
  cfg.gamma_grid = {1e-1, 1e-2};
  cfg.output_dir = (dir / "a").string();
  cfg.record_timing = false;
  cfg.threads = 3;
  const auto res = run_sweep(cfg);
  CHECK_FALSE(res.any_failed());
  REQUIRE(res.rows.size() == 4);
  CHECK(res.rows[0].lambda == 0.3);
  CHECK(res.rows[1].gamma == 1e-2);
  for (const auto& r : res.rows) {
    CHECK(r.cost_accuracy >= -1e-12);
    CHECK(r.descent_violations == 0);
  }
  CHECK(res.rows[1].cost_accuracy < res.rows[0].cost_accuracy);

  const fs::path a(cfg.output_dir);
  CHECK(slurp(a / "table.csv").rfind("lambda,gamma,cost_acc,psnr_tv,psnr_gt,iters,seconds\n", 0) == 0);
  CHECK(fs::exists(a / "table_fpg50.csv"));
  CHECK(fs::exists(a / "runs" / "l1_g1_p1" / "trace.csv"));
  CHECK(fs::exists(a / "runs" / "l1_g1_p1" / "recon.pgm"));
  CHECK(fs::exists(a / "runs" / "l0_g0_p0" / "diff.pgm"));
  CHECK(fs::exists(a / "phantoms" / "p1_truth.pgm"));
  CHECK(slurp(a / "runs" / "l0_g0_p0" / "recon.pgm").rfind("P2\n16 16\n255\n", 0) == 0);

  cfg.output_dir = (dir / "b").string();
  cfg.threads = 1;
  run_sweep(cfg);
  CHECK(slurp(a / "table.csv") == slurp(fs::path(cfg.output_dir) / "table.csv"));
  CHECK(slurp(a / "runs" / "l1_g0_p1" / "trace.csv") ==
        slurp(fs::path(cfg.output_dir) / "runs" / "l1_g0_p1" / "trace.csv"));
  fs::remove_all(dir);
}

TEST_CASE("aborted runs are reported and the sweep carries on") {
  auto cfg = ExperimentConfig::defaults(Task::ct);
  cfg.image_size = 16;
  cfg.n_phantoms = 1;
  cfg.n_angles = 6;
  cfg.solver = SolverKind::apgm;
  cfg.lambda_grid = {0.5};
  cfg.gamma_grid = {1.0, 40.0};  // fractions of 1/L; the second diverges
  cfg.capped_fpg_iters = 0;
  cfg.tight_stop_tol = 1e-8;
  const auto res = run_sweep(cfg);
  REQUIRE(res.rows.size() == 2);
  CHECK(res.rows[0].failed == 0);
  CHECK(res.rows[1].failed == 1);
  CHECK(res.any_failed());
  std::ostringstream os;
  write_table(os, res.rows, false);
  CHECK(os.str().find("40,nan,nan,nan,nan,") != std::string::npos);
}

TEST_CASE("pgm output") {
  const auto path = (fs::temp_directory_path() / "tvprox_test.pgm").string();
  save_pgm(path, NdSignal({2, 3}, {0, 1, 2, 3, 4, 5}));
  CHECK(slurp(path) == "P2\n3 2\n255\n0 51 102\n153 204 255\n");
  save_pgm(path, NdSignal({2, 2}, 7.0));
  CHECK(slurp(path) == "P2\n2 2\n255\n0 0\n0 0\n");
  fs::remove(path);
  CHECK_THROWS_AS(save_pgm(path, NdSignal({4})), ShapeError);
}
