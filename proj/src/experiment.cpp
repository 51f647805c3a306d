#include "convexmix/experiment.hpp"

#include <charconv>
#include <cstdlib>
#include <string_view>

#include "convexmix/errors.hpp"
#include "convexmix/oracle.hpp"

namespace convexmix {

double inequality_tolerance() {
  const char* env = std::getenv("CONVEXMIX_TOL");
  if (!env || !*env) return 1e-9;
  double v = 0.0;
  const std::string_view text(env);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !(v >= 0.0)) {
    throw DomainError("CONVEXMIX_TOL must be a non-negative number");
  }
  return v;
}

Window Window::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw DomainError("window must look like A:B");
  auto parse_index = [&](std::string_view part) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || ec != std::errc{} || ptr != part.data() + part.size()) {
      throw DomainError("window bounds must be positive integers: " + text);
    }
    return v;
  };
  const std::string_view sv(text);
  Window w{parse_index(sv.substr(0, colon)), parse_index(sv.substr(colon + 1))};
  if (w.first == 0 || w.last < w.first) throw DomainError("window needs 1 <= A <= B: " + text);
  return w;
}

nlohmann::json to_json(const RunSummary& s) {
  nlohmann::json j;
  j["n"] = s.n;
  j["mu"] = s.mu;
  j["eps"] = s.eps;
  j["lambda_plus"] = s.lambda_plus;
  j["y_bound"] = s.y_bound;
  j["mode"] = to_string(s.mode);
  j["lambda_init"] = s.lambda_init;
  j["final_lambda"] = s.final_lambda;
  j["loss_alg"] = s.loss_alg;
  j["best_beta"] = s.best_beta;
  j["best_beta_degenerate"] = s.best_beta_degenerate;
  j["loss_best"] = s.loss_best;
  j["regret_multiplier"] = s.regret_multiplier;
  j["regret"] = s.regret;
  j["norm_regret"] = s.norm_regret;
  j["bound_total"] = s.bound_total;
  j["bound_normalized"] = s.bound_normalized;
  j["bound_total_at_best_beta"] = s.bound_total_at_best_beta;
  j["bound_convention"] = "worst-case KL over beta at lambda_init divided by a (ln 2 / a at lambda_init = 1/2)";
  j["out_of_range_steps"] = s.out_of_range_steps;
  j["projected_steps"] = s.projected_steps;
  j["clip_count"] = s.clip_count;
  j["theorem_valid"] = s.theorem_valid;
  if (s.window) {
    const auto& w = *s.window;
    j["window"] = {{"first", w.window.first},   {"last", w.window.last},
                   {"lambda_start", w.lambda_start}, {"loss_alg", w.loss_alg},
                   {"best_beta", w.best_beta},   {"best_beta_degenerate", w.best_beta_degenerate},
                   {"loss_best", w.loss_best},   {"regret", w.regret},
                   {"bound_total", w.bound_total}};
  }
  return j;
}

RunResult run_experiment(const RunConfig& config, const LoadedSequence& sequence) {
  MixtureParams params = config.params;
  if (!(params.lambda_plus > 0.0 && params.lambda_plus < 0.5)) throw DomainError("lambda_plus must lie in (0, 1/2)");
  if (!(params.y_bound > 0.0)) throw DomainError("y_bound must be positive");
  if (sequence.samples.empty()) throw DomainError("run: empty sequence");

  RunResult result;
  if (config.eps) {
    result.constants = constants_from_eps(*config.eps, params.y_bound, params.lambda_plus);
    params.mu = result.constants.mu;
  } else {
    const double eps = eps_from_mu(params.mu, params.y_bound, params.lambda_plus);
    result.constants = constants_from_eps(eps, params.y_bound, params.lambda_plus);
  }
  params.validate();
  const auto& c = result.constants;

  const auto initial = MixtureState::from_lambda(config.lambda_init);
  const auto traj = run(params, sequence.samples, initial);

  auto& summary = result.summary;
  result.rows.reserve(traj.size());
  OracleStats stats;
  BestBeta best;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto& rec = traj.steps[i];
    const auto& sample = sequence.samples[i];
    stats = accumulate(stats, sample);
    best = best_beta(stats);
    const auto rb = regret_and_bound(traj.cum_loss[i], best.loss, c, i + 1, config.lambda_init);

    TrajectoryRow row;
    row.t = rec.t;
    row.y = sample.y;
    row.yhat1 = sample.yhat1;
    row.yhat2 = sample.yhat2;
    row.lambda = rec.lambda_before;
    row.rho = rec.rho_before;
    row.yhat = rec.yhat;
    row.e = rec.e;
    row.cum_loss = traj.cum_loss[i];
    row.best_beta_prefix = best.beta;
    row.best_loss_prefix = best.loss;
    row.regret = rb.regret;
    row.norm_regret = rb.regret / static_cast<double>(i + 1);
    row.bound_norm = rb.bound_normalized;
    row.in_range = rec.in_range;
    row.projected = rec.projected;
    result.rows.push_back(row);

    if (!rec.in_range) ++summary.out_of_range_steps;
    if (rec.projected) ++summary.projected_steps;
  }

  const auto& last = result.rows.back();
  const auto rb = regret_and_bound(last.cum_loss, last.best_loss_prefix, c, result.rows.size(), config.lambda_init);
  summary.n = result.rows.size();
  summary.mu = params.mu;
  summary.eps = c.eps;
  summary.lambda_plus = params.lambda_plus;
  summary.y_bound = params.y_bound;
  summary.mode = params.mode;
  summary.lambda_init = config.lambda_init;
  summary.final_lambda = traj.steps.back().lambda_after;
  summary.loss_alg = last.cum_loss;
  summary.best_beta = last.best_beta_prefix;
  summary.best_beta_degenerate = best.degenerate;
  summary.loss_best = last.best_loss_prefix;
  summary.regret_multiplier = regret_multiplier(c);
  summary.regret = rb.regret;
  summary.norm_regret = last.norm_regret;
  summary.bound_total = rb.bound_total;
  summary.bound_normalized = rb.bound_normalized;
  summary.bound_total_at_best_beta =
      regret_and_bound(last.cum_loss, last.best_loss_prefix, c, summary.n, config.lambda_init, best.beta).bound_total;
  summary.clip_count = sequence.clip_count;
  summary.theorem_valid = summary.out_of_range_steps == 0;

  if (config.window) {
    if (config.window->last > summary.n) throw DomainError("window extends past the end of the sequence");
    summary.window = windowed_regret(result.rows, c, *config.window);
  }
  return result;
}

WindowSummary windowed_regret(std::span<const TrajectoryRow> rows, const TheoremConstants& constants, Window window) {
  if (window.first == 0 || window.last < window.first || window.last > rows.size()) {
    throw DomainError("window out of range");
  }
  WindowSummary w;
  w.window = window;
  w.lambda_start = rows[window.first - 1].lambda;
  OracleStats stats;
  for (std::size_t i = window.first - 1; i < window.last; ++i) {
    const auto& r = rows[i];
    stats = accumulate(stats, SignalSample{r.y, r.yhat1, r.yhat2});
    w.loss_alg += r.e * r.e;
  }
  const auto best = best_beta(stats);
  w.best_beta = best.beta;
  w.loss_best = best.loss;
  w.best_beta_degenerate = best.degenerate;
  const auto rb = regret_and_bound(w.loss_alg, w.loss_best, constants, stats.n, w.lambda_start);
  w.regret = rb.regret;
  w.bound_total = rb.bound_total;
  return w;
}

}  // namespace convexmix
