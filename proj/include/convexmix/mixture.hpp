#pragma once

// Online convexly constrained combination of two experts.
//
// The combiner keeps an unconstrained auxiliary variable rho and predicts
// with lambda = logistic(rho):
//
//   yhat_t   = lambda_t * yhat1_t + (1 - lambda_t) * yhat2_t
//   e_t      = y_t - yhat_t
//   rho_t+1  = rho_t + mu * e_t * lambda_t * (1 - lambda_t) * (yhat1_t - yhat2_t)
//
// The same update written directly on lambda is a multiplicative
// (exponentiated-gradient) rule with effective rate mu * lambda * (1 - lambda);
// step_multiplicative() evaluates that form and must agree with step().

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace convexmix {

struct SignalSample {
  double y = 0.0;
  double yhat1 = 0.0;
  double yhat2 = 0.0;

  friend bool operator==(const SignalSample&, const SignalSample&) = default;
};

/// How the [lambda_plus, 1 - lambda_plus] constraint is treated.
///   monitor: run the raw update and only flag out-of-range steps.
///   project: clamp lambda to the nearest boundary and reset rho = logit(lambda).
enum class ConstraintMode { monitor, project };

const char* to_string(ConstraintMode mode);
ConstraintMode parse_constraint_mode(const std::string& text);

struct MixtureParams {
  double mu = 0.0;
  double lambda_plus = 0.0;
  double y_bound = 0.0;
  ConstraintMode mode = ConstraintMode::monitor;

  /// Throws DomainError unless mu > 0, 0 < lambda_plus < 1/2, y_bound > 0.
  void validate() const;
};

struct MixtureState {
  double rho = 0.0;
  double lambda = 0.5;
  std::size_t t = 1;

  /// Consistent state with the given weight; lambda must lie in (0,1).
  static MixtureState from_lambda(double lambda, std::size_t t = 1);
};

struct StepRecord {
  std::size_t t = 0;
  double rho_before = 0.0;
  double lambda_before = 0.0;
  double rho_after = 0.0;
  double lambda_after = 0.0;
  double yhat = 0.0;
  double e = 0.0;
  bool in_range = false;
  bool projected = false;
};

struct Trajectory {
  std::vector<StepRecord> steps;
  std::vector<double> cum_loss;  // cum_loss[i] = sum of e^2 over steps[0..i]

  std::size_t size() const noexcept { return steps.size(); }
  double total_loss() const { return cum_loss.empty() ? 0.0 : cum_loss.back(); }
  MixtureState final_state() const;
};

double logistic(double rho);
double logit(double lambda);

/// True when lambda lies in the closed interval [lambda_plus, 1 - lambda_plus].
bool in_constraint_range(double lambda, double lambda_plus) noexcept;

double predict(double lambda, const SignalSample& sample);

std::pair<MixtureState, StepRecord> step(const MixtureParams& params, const MixtureState& state,
                                         const SignalSample& sample);

double step_multiplicative(const MixtureParams& params, double lambda, const SignalSample& sample);

/// Applies step() sequentially from `initial`. Errors carry the failing step index.
Trajectory run(const MixtureParams& params, std::span<const SignalSample> sequence,
               const MixtureState& initial = MixtureState{});

}  // namespace convexmix
