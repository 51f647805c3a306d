#include "convexmix/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

#include "convexmix/errors.hpp"
#include "convexmix/mixture.hpp"
#include "convexmix/oracle.hpp"
#include "convexmix/regret.hpp"
#include "convexmix/rng.hpp"

namespace convexmix {

namespace {

enum Suite : std::size_t { kMargin, kForm, kTelescope, kOracle, kConstants, kSuiteCount };
constexpr std::array<const char*, kSuiteCount> kSuiteNames{"per_step_margin", "form_equivalence", "telescoping",
                                                           "oracle_agreement", "constant_identities"};

class Recorder {
 public:
  explicit Recorder(VerifyReport& report) : report_(report) {
    for (const char* name : kSuiteNames) report_.suites.push_back(SuiteTally{name, 0, 0});
  }

  void check(Suite suite, bool ok, VerifyFailure failure) {
    auto& tally = report_.suites[suite];
    ++tally.checks;
    if (ok) return;
    ++tally.failures;
    ++report_.total_failures;
    if (report_.failures.size() < VerifyReport::kMaxRecordedFailures) {
      failure.suite = kSuiteNames[suite];
      report_.failures.push_back(std::move(failure));
    }
  }

 private:
  VerifyReport& report_;
};

}  // namespace

nlohmann::json VerifyReport::to_json() const {
  nlohmann::json j;
  j["passed"] = passed();
  j["tolerance"] = config.tolerance;
  j["trials"] = config.trials;
  j["n"] = config.n;
  j["seed"] = config.seed;
  j["eps"] = config.eps;
  j["y_bound"] = config.y_bound;
  j["lambda_plus"] = config.lambda_plus;
  if (config.override_a) j["override_a"] = *config.override_a;
  j["skipped_out_of_range_steps"] = skipped_out_of_range;
  j["min_margin"] = min_margin;
  j["total_failures"] = total_failures;
  auto& suites_json = j["suites"];
  suites_json = nlohmann::json::array();
  for (const auto& s : suites) suites_json.push_back({{"name", s.name}, {"checks", s.checks}, {"failures", s.failures}});
  auto& fails = j["failures"];
  fails = nlohmann::json::array();
  for (const auto& f : failures) {
    fails.push_back({{"suite", f.suite},
                     {"trial", f.trial},
                     {"seed", f.seed},
                     {"step", f.step},
                     {"beta", f.beta},
                     {"value", f.value},
                     {"detail", f.detail}});
  }
  return j;
}

VerifyReport run_verification(const VerifyConfig& cfg) {
  if (cfg.trials == 0 || cfg.n == 0) throw DomainError("verify: trials and n must be at least 1");
  VerifyReport report;
  report.config = cfg;
  report.min_margin = std::numeric_limits<double>::infinity();
  Recorder rec(report);

  auto constants = constants_from_eps(cfg.eps, cfg.y_bound, cfg.lambda_plus);
  if (cfg.override_a) constants.a = *cfg.override_a;

  const auto identity_failures = constant_identity_failures(constants);
  rec.check(kConstants, identity_failures.empty(),
            VerifyFailure{{}, 0, cfg.seed, 0, 0.0, 0.0,
                          identity_failures.empty() ? std::string{} : "violated: " + identity_failures.front()});
  bool roots_ok = false;
  try {
    const auto roots = sufficiency_roots(constants);
    roots_ok = roots.k1_covers_quarter && roots.k2_covers_boundary;
  } catch (const NumericError&) {
  }
  rec.check(kConstants, roots_ok, VerifyFailure{{}, 0, cfg.seed, 0, 0.0, 0.0, "sufficiency roots do not cover range"});
  const double eps_back = eps_from_mu(constants.mu, cfg.y_bound, cfg.lambda_plus);
  rec.check(kConstants, std::abs(eps_back - constants.eps) <= 1e-12 * constants.eps,
            VerifyFailure{{}, 0, cfg.seed, 0, 0.0, eps_back, "eps_from_mu roundtrip"});

  const MixtureParams params{constants.mu, cfg.lambda_plus, cfg.y_bound, ConstraintMode::monitor};
  constexpr std::array<double, 5> fixed_betas{0.0, 0.25, 0.5, 0.75, 1.0};
  constexpr std::array<double, 3> telescope_betas{0.0, 0.5, 1.0};

  for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
    const std::uint64_t trial_seed = cfg.seed + trial;
    std::mt19937_64 rng(trial_seed);
    std::vector<SignalSample> seq(cfg.n);
    for (auto& s : seq) {
      s.y = uniform(rng, -cfg.y_bound, cfg.y_bound);
      s.yhat1 = uniform(rng, -cfg.y_bound, cfg.y_bound);
      s.yhat2 = uniform(rng, -cfg.y_bound, cfg.y_bound);
    }

    Trajectory traj;
    try {
      traj = run(params, seq);
    } catch (const NumericError& e) {
      rec.check(kForm, false, VerifyFailure{{}, trial, trial_seed, e.step().value_or(0), 0.0, 0.0, e.what()});
      continue;
    }

    std::array<double, telescope_betas.size()> progress_sum{};
    std::vector<double> betas(fixed_betas.begin(), fixed_betas.end());
    for (std::size_t i = 0; i < traj.size(); ++i) {
      const auto& step_rec = traj.steps[i];
      const auto& sample = seq[i];
      const double lam0 = step_rec.lambda_before;
      const double lam1 = step_rec.lambda_after;

      const double mult = step_multiplicative(params, lam0, sample);
      const double form_gap = std::abs(mult - lam1);
      rec.check(kForm, form_gap <= 1e-12, VerifyFailure{{}, trial, trial_seed, step_rec.t, 0.0, form_gap, "|step - step_multiplicative|"});

      for (std::size_t k = 0; k < telescope_betas.size(); ++k) {
        progress_sum[k] += kl_progress(telescope_betas[k], lam0, lam1);
      }

      if (!step_rec.in_range) {
        ++report.skipped_out_of_range;
        continue;
      }
      betas.resize(fixed_betas.size());
      for (std::size_t k = 0; k < cfg.random_betas; ++k) betas.push_back(unit_uniform(rng));
      for (double beta : betas) {
        const double e_beta = sample.y - (beta * sample.yhat1 + (1.0 - beta) * sample.yhat2);
        const double margin = per_step_margin(constants, beta, lam0, lam1, step_rec.e, e_beta);
        report.min_margin = std::min(report.min_margin, margin);
        rec.check(kMargin, margin >= -cfg.tolerance,
                  VerifyFailure{{}, trial, trial_seed, step_rec.t, beta, margin, "per-step margin below tolerance"});
      }
    }

    const double lam_first = traj.steps.front().lambda_before;
    const double lam_end = traj.steps.back().lambda_after;
    for (std::size_t k = 0; k < telescope_betas.size(); ++k) {
      const auto u = ProbPair::of(telescope_betas[k]);
      const double expected = kl(u, ProbPair::of(lam_first)) - kl(u, ProbPair::of(lam_end));
      const double gap = std::abs(progress_sum[k] - expected);
      rec.check(kTelescope, gap <= cfg.tolerance,
                VerifyFailure{{}, trial, trial_seed, 0, telescope_betas[k], gap, "telescoping sum mismatch"});
    }

    const auto closed = best_beta(stats_of(seq));
    if (!closed.degenerate) {
      const auto grid = grid_best_beta(seq, cfg.oracle_resolution);
      const double gap = std::abs(closed.beta - grid.beta);
      rec.check(kOracle, gap <= cfg.oracle_resolution,
                VerifyFailure{{}, trial, trial_seed, 0, closed.beta, grid.beta, "closed form vs grid beta"});
    }
  }
  if (report.min_margin == std::numeric_limits<double>::infinity()) report.min_margin = 0.0;
  return report;
}

}  // namespace convexmix
