#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "convexmix/errors.hpp"
#include "convexmix/experiment.hpp"
#include "convexmix/oracle.hpp"
#include "convexmix/plot.hpp"
#include "convexmix/verify.hpp"

using namespace convexmix;
namespace fs = std::filesystem;

namespace {

RunConfig case_config(int which, ConstraintMode mode = ConstraintMode::project) {
  RunConfig cfg;
  cfg.params = which == 1 ? MixtureParams{0.08, 0.08, 0.5, mode} : MixtureParams{0.04, 0.08, 0.54, mode};
  return cfg;
}

LoadedSequence case_seq(int which, std::size_t n = 10000) {
  return {generate(which == 1 ? SequenceSpec::case1(n) : SequenceSpec::case2(n)), 0};
}

}  // namespace

TEST_CASE("run_experiment: case 1 summary") {
  const auto res = run_experiment(case_config(1), case_seq(1));
  const auto& s = res.summary;
  CHECK(s.n == 10000);
  CHECK(s.best_beta == 1.0);
  CHECK(s.loss_best == 0.0);
  CHECK(s.regret == s.loss_alg);
  CHECK(s.final_lambda == 0.92);
  CHECK(s.projected_steps > 0);
  CHECK(s.out_of_range_steps == 0);
  CHECK(s.theorem_valid);
  CHECK(s.bound_total == doctest::Approx(152.37936659592276).epsilon(1e-12));
  CHECK(s.regret <= s.bound_total);

  const auto& last = res.rows.back();
  CHECK(last.cum_loss == s.loss_alg);
  CHECK(last.best_beta_prefix == s.best_beta);
  CHECK(last.best_loss_prefix == s.loss_best);
  CHECK(last.regret == s.regret);
  CHECK(last.norm_regret == s.norm_regret);
  CHECK(last.bound_norm == s.bound_normalized);

  const auto j = to_json(s);
  for (const char* key : {"n", "final_lambda", "loss_alg", "best_beta", "loss_best", "regret", "norm_regret",
                          "bound_total", "bound_normalized", "out_of_range_steps", "projected_steps", "clip_count",
                          "theorem_valid"}) {
    CHECK(j.contains(key));
  }
}

TEST_CASE("run_experiment: monitor mode flags out-of-range steps") {
  const auto res = run_experiment(case_config(2, ConstraintMode::monitor), case_seq(2));
  CHECK(res.summary.projected_steps == 0);
  CHECK(res.summary.out_of_range_steps > 0);
  CHECK_FALSE(res.summary.theorem_valid);
  CHECK(res.summary.best_beta == doctest::Approx(0.9601).epsilon(1e-3));
}

TEST_CASE("run_experiment: eps drives mu") {
  RunConfig cfg = case_config(1, ConstraintMode::monitor);
  cfg.eps = 0.0016232528462103366;
  const auto res = run_experiment(cfg, case_seq(1, 50));
  CHECK(res.summary.mu == doctest::Approx(0.08).epsilon(1e-12));
}

TEST_CASE("windowed regret equals a from-scratch recomputation") {
  SequenceSpec spec;
  spec.kind = SequenceKind::piecewise_switch;
  spec.n = 2000;
  spec.y_bound = 1.0;
  spec.level = 0.8;
  spec.switch_points = {1000};
  LoadedSequence seq{generate(spec), 0};
  RunConfig cfg;
  cfg.params = MixtureParams{0.5, 0.05, 1.0, ConstraintMode::project};
  cfg.window = Window::parse("1001:2000");
  const auto res = run_experiment(cfg, seq);
  REQUIRE(res.summary.window);
  const auto& w = *res.summary.window;

  // Scratch route: slice the sequence, brute-force beta, direct sums.
  std::vector<SignalSample> slice(seq.samples.begin() + 1000, seq.samples.end());
  double loss_alg = 0.0;
  for (std::size_t i = 1000; i < 2000; ++i) loss_alg += res.rows[i].e * res.rows[i].e;
  const auto grid = grid_best_beta(slice, 1e-4);
  const auto closed = best_beta(stats_of(slice));
  CHECK(w.loss_alg == doctest::Approx(loss_alg).epsilon(1e-12));
  CHECK(std::abs(w.best_beta - grid.beta) <= 1e-4);
  CHECK(w.best_beta == doctest::Approx(closed.beta).epsilon(1e-12));
  CHECK(w.regret == doctest::Approx(loss_alg - regret_multiplier(res.constants) * closed.loss).epsilon(1e-10));
  CHECK(w.lambda_start == res.rows[1000].lambda);
  CHECK(w.regret <= w.bound_total);

  CHECK_THROWS_AS(Window::parse("5"), DomainError);
  CHECK_THROWS_AS(Window::parse("5:3"), DomainError);
  CHECK_THROWS_AS(Window::parse("0:3"), DomainError);
  cfg.window = Window{1, 5000};
  CHECK_THROWS_AS(run_experiment(cfg, seq), DomainError);
}

TEST_CASE("inequality tolerance env override") {
  ::unsetenv("CONVEXMIX_TOL");
  CHECK(inequality_tolerance() == 1e-9);
  ::setenv("CONVEXMIX_TOL", "1e-6", 1);
  CHECK(inequality_tolerance() == 1e-6);
  ::setenv("CONVEXMIX_TOL", "garbage", 1);
  CHECK_THROWS_AS(inequality_tolerance(), DomainError);
  ::unsetenv("CONVEXMIX_TOL");
}

TEST_CASE("verification suites") {
  VerifyConfig cfg;
  cfg.trials = 10;
  cfg.n = 200;
  const auto ok = run_verification(cfg);
  CHECK(ok.passed());
  for (const auto& s : ok.suites) CHECK(s.checks > 0);
  CHECK(ok.min_margin >= -1e-9);

  VerifyConfig minimal;
  minimal.trials = 1;
  minimal.n = 1;
  minimal.seed = 0;
  const auto tiny = run_verification(minimal);
  CHECK(tiny.passed());
  CHECK(tiny.to_json()["trials"] == 1);

  VerifyConfig broken = cfg;
  broken.trials = 2;
  broken.override_a = 2 * constants_from_eps(cfg.eps, cfg.y_bound, cfg.lambda_plus).a;
  const auto bad = run_verification(broken);
  CHECK_FALSE(bad.passed());
  bool identity_failed = false;
  for (const auto& s : bad.suites) identity_failed |= (s.name == "constant_identities" && s.failures > 0);
  CHECK(identity_failed);
  REQUIRE_FALSE(bad.failures.empty());
}

TEST_CASE("plot: deterministic SVG with both curves") {
  const auto res = run_experiment(case_config(1), case_seq(1));
  for (const auto& r : res.rows) REQUIRE(r.bound_norm > r.norm_regret);

  const auto dir = fs::temp_directory_path() / "convexmix_tests";
  fs::create_directories(dir);
  write_trajectory(res.rows, dir / "plot_traj.csv");
  const auto series = plot_series_from_table(read_csv_table(dir / "plot_traj.csv"));
  PlotOptions opts;
  opts.logx = true;
  const auto a = render_plot_svg(series, opts);
  const auto b = render_plot_svg(series, opts);
  CHECK(a == b);
  CHECK(a.find("id=\"bound\"") != std::string::npos);
  CHECK(a.find("id=\"regret\"") != std::string::npos);
  CHECK(a.find("ln 2") != std::string::npos);

  PlotSeries single{{1.0}, {0.25}, {152.0}};
  const auto one = render_plot_svg(single);
  CHECK(one.find("<circle") != std::string::npos);

  CsvTable missing{{"t", "regret"}, {{1, 0.1}}};
  CHECK_THROWS_AS(plot_series_from_table(missing), ParseError);
}
