#include "convexmix/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "convexmix/errors.hpp"

namespace convexmix {

const char* to_string(ConstraintMode mode) {
  return mode == ConstraintMode::project ? "project" : "monitor";
}

ConstraintMode parse_constraint_mode(const std::string& text) {
  if (text == "monitor") return ConstraintMode::monitor;
  if (text == "project") return ConstraintMode::project;
  throw DomainError("unknown constraint mode '" + text + "' (expected monitor or project)");
}

void MixtureParams::validate() const {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw DomainError("mu must be a positive finite number");
  if (!(lambda_plus > 0.0 && lambda_plus < 0.5)) throw DomainError("lambda_plus must lie in (0, 1/2)");
  if (!(y_bound > 0.0) || !std::isfinite(y_bound)) throw DomainError("y_bound must be a positive finite number");
}

MixtureState MixtureState::from_lambda(double lambda, std::size_t t) {
  return MixtureState{logit(lambda), lambda, t};
}

MixtureState Trajectory::final_state() const {
  if (steps.empty()) return MixtureState{};
  const auto& last = steps.back();
  return MixtureState{last.rho_after, last.lambda_after, last.t + 1};
}

double logistic(double rho) {
  if (!std::isfinite(rho)) throw DomainError("logistic: non-finite argument");
  if (rho >= 0.0) return 1.0 / (1.0 + std::exp(-rho));
  const double er = std::exp(rho);
  return er / (1.0 + er);
}

double logit(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("logit: argument must lie in (0,1)");
  return std::log(lambda) - std::log1p(-lambda);
}

bool in_constraint_range(double lambda, double lambda_plus) noexcept {
  return lambda >= lambda_plus && lambda <= 1.0 - lambda_plus;
}

double predict(double lambda, const SignalSample& sample) {
  return lambda * sample.yhat1 + (1.0 - lambda) * sample.yhat2;
}

std::pair<MixtureState, StepRecord> step(const MixtureParams& params, const MixtureState& state,
                                         const SignalSample& sample) {
  StepRecord rec;
  rec.t = state.t;
  rec.rho_before = state.rho;
  rec.lambda_before = state.lambda;
  rec.in_range = in_constraint_range(state.lambda, params.lambda_plus);
  rec.yhat = predict(state.lambda, sample);
  rec.e = sample.y - rec.yhat;

  const double delta =
      params.mu * rec.e * state.lambda * (1.0 - state.lambda) * (sample.yhat1 - sample.yhat2);
  double rho = state.rho + delta;
  if (!std::isfinite(rec.e) || !std::isfinite(rho)) throw NumericError("non-finite rho update", state.t);
  double lambda = logistic(rho);
  if (!(lambda > 0.0 && lambda < 1.0)) throw NumericError("combination weight saturated at 0 or 1", state.t);

  if (params.mode == ConstraintMode::project && !in_constraint_range(lambda, params.lambda_plus)) {
    lambda = std::clamp(lambda, params.lambda_plus, 1.0 - params.lambda_plus);
    rho = logit(lambda);
    rec.projected = true;
  }
  rec.rho_after = rho;
  rec.lambda_after = lambda;
  return {MixtureState{rho, lambda, state.t + 1}, rec};
}

double step_multiplicative(const MixtureParams& params, double lambda, const SignalSample& sample) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("step_multiplicative: lambda must lie in (0,1)");
  const double e = sample.y - predict(lambda, sample);
  const double rate = params.mu * e * lambda * (1.0 - lambda);
  const double x1 = rate * sample.yhat1;
  const double x2 = rate * sample.yhat2;
  const double top = std::max(x1, x2);
  const double w1 = lambda * std::exp(x1 - top);
  const double w2 = (1.0 - lambda) * std::exp(x2 - top);
  const double out = w1 / (w1 + w2);
  if (!std::isfinite(out)) throw NumericError("step_multiplicative: non-finite result");
  return out;
}

Trajectory run(const MixtureParams& params, std::span<const SignalSample> sequence, const MixtureState& initial) {
  params.validate();
  if (sequence.empty()) throw DomainError("run: empty sequence");
  Trajectory traj;
  traj.steps.reserve(sequence.size());
  traj.cum_loss.reserve(sequence.size());
  MixtureState state = initial;
  double loss = 0.0;
  for (const auto& sample : sequence) {
    auto [next, rec] = step(params, state, sample);
    loss += rec.e * rec.e;
    traj.steps.push_back(rec);
    traj.cum_loss.push_back(loss);
    state = next;
  }
  return traj;
}

}  // namespace convexmix
