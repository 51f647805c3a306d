#include "convexmix/lemma.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "convexmix/errors.hpp"
#include "convexmix/mixture.hpp"
#include "convexmix/regret.hpp"
#include "convexmix/rng.hpp"

namespace convexmix {

namespace {

void check_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(name) + " must be a positive finite number");
}

}  // namespace

LemmaBounds lemma_bounds(double a, double mu, double lambda_plus) {
  check_positive(a, "a");
  check_positive(mu, "mu");
  if (!(lambda_plus > 0.0 && lambda_plus < 0.5)) throw DomainError("lambda_plus must lie in (0, 1/2)");
  const double k0 = lambda_plus * (1.0 - lambda_plus);
  return LemmaBounds{a / k0, 4.0 * a + mu / 4.0, 4.0 * a + a / (4.0 * k0)};
}

std::pair<AuditInstance, AuditInstance> construction_instances(double y_bound, double lambda_plus) {
  check_positive(y_bound, "y_bound");
  if (!(lambda_plus > 0.0 && lambda_plus < 0.5)) throw DomainError("lambda_plus must lie in (0, 1/2)");
  return {AuditInstance{y_bound, y_bound, 0.0, lambda_plus, 1.0},
          AuditInstance{-y_bound / 2.0, 0.0, y_bound, 0.5, 1.0}};
}

AuditReport evaluate_instance(double a, double b, double mu, const AuditInstance& inst, double tolerance) {
  if (!(inst.lambda_t > 0.0 && inst.lambda_t < 1.0)) throw DomainError("evaluate_instance: lambda_t must lie in (0,1)");
  if (!(inst.beta >= 0.0 && inst.beta <= 1.0)) throw DomainError("evaluate_instance: beta must lie in [0,1]");

  const SignalSample sample{inst.y, inst.yhat1, inst.yhat2};
  // Only mu enters the update; the boundary is irrelevant to a single step.
  const MixtureParams params{mu, 0.25, 1.0, ConstraintMode::monitor};
  AuditReport rep;
  rep.lambda_t1 = step_multiplicative(params, inst.lambda_t, sample);
  if (!(rep.lambda_t1 > 0.0 && rep.lambda_t1 < 1.0)) throw NumericError("evaluate_instance: updated weight degenerate");
  rep.e_t = inst.y - predict(inst.lambda_t, sample);
  rep.e_beta = inst.y - (inst.beta * inst.yhat1 + (1.0 - inst.beta) * inst.yhat2);
  rep.lhs = a * rep.e_t * rep.e_t - b * rep.e_beta * rep.e_beta;
  rep.progress = kl_progress(inst.beta, inst.lambda_t, rep.lambda_t1);
  rep.margin = rep.progress - rep.lhs;
  rep.violated = rep.margin < -tolerance;
  return rep;
}

SearchResult search_violations(double a, double b, double mu, double lambda_plus, double y_bound, std::size_t budget,
                               std::uint64_t seed, double tolerance) {
  check_positive(a, "a");
  check_positive(b, "b");
  check_positive(mu, "mu");
  check_positive(y_bound, "y_bound");
  if (!(lambda_plus > 0.0 && lambda_plus < 0.5)) throw DomainError("lambda_plus must lie in (0, 1/2)");
  if (budget == 0) throw DomainError("search_violations: budget must be at least 1");

  const std::array<double, 5> levels{-y_bound, -y_bound / 2.0, 0.0, y_bound / 2.0, y_bound};
  const std::array<double, 5> lambdas{lambda_plus, 0.25, 0.5, 0.75, 1.0 - lambda_plus};
  const std::array<double, 3> betas{0.0, 0.5, 1.0};

  std::vector<AuditInstance> grid;
  for (double y : levels)
    for (double y1 : levels)
      for (double y2 : levels)
        for (double lam : lambdas) {
          if (!in_constraint_range(lam, lambda_plus)) continue;
          for (double beta : betas) grid.push_back(AuditInstance{y, y1, y2, lam, beta});
        }

  SearchResult result;
  result.grid_size = grid.size();
  auto consider = [&](const AuditInstance& inst) {
    const auto rep = evaluate_instance(a, b, mu, inst, tolerance);
    ++result.evaluated;
    if (rep.violated) result.witnesses.push_back(Witness{inst, rep});
  };

  for (std::size_t i = 0; i < grid.size() && result.evaluated < budget; ++i) consider(grid[i]);

  std::mt19937_64 rng(seed);
  while (result.evaluated < budget) {
    AuditInstance inst;
    inst.y = uniform(rng, -y_bound, y_bound);
    inst.yhat1 = uniform(rng, -y_bound, y_bound);
    inst.yhat2 = uniform(rng, -y_bound, y_bound);
    inst.lambda_t = uniform(rng, lambda_plus, 1.0 - lambda_plus);
    inst.beta = uniform(rng, 0.0, 1.0);
    consider(inst);
  }

  std::sort(result.witnesses.begin(), result.witnesses.end(), [](const Witness& l, const Witness& r) {
    if (l.report.margin != r.report.margin) return l.report.margin < r.report.margin;
    return l.instance < r.instance;
  });
  return result;
}

}  // namespace convexmix
