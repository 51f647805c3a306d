#pragma once

// Audit of the necessary-condition lemma for the per-step inequality
//   a e_t^2 - b e_beta_t^2 <= D(u||w_t) - D(u||w_t+1).
//
// The reference constructions bound the progress with Jensen's inequality.
// Here every instance is evaluated exactly through the multiplicative
// update, so a report states what the inequality actually does on that
// instance rather than what the bound says it should do.

#include <cstdint>
#include <utility>
#include <vector>

namespace convexmix {

struct AuditInstance {
  double y = 0.0;
  double yhat1 = 0.0;
  double yhat2 = 0.0;
  double lambda_t = 0.5;
  double beta = 1.0;

  friend auto operator<=>(const AuditInstance&, const AuditInstance&) = default;
};

struct AuditReport {
  double lhs = 0.0;       // a e_t^2 - b e_beta^2
  double progress = 0.0;  // exact KL progress under the update
  double margin = 0.0;    // progress - lhs
  double lambda_t1 = 0.0;
  double e_t = 0.0;
  double e_beta = 0.0;
  bool violated = false;  // margin < -tolerance
};

struct LemmaBounds {
  double mu_min = 0.0;          // a / (lambda_plus (1 - lambda_plus))
  double b_min_via_mu = 0.0;    // 4a + mu/4
  double b_min_combined = 0.0;  // 4a + a / (4 lambda_plus (1 - lambda_plus))
};

LemmaBounds lemma_bounds(double a, double mu, double lambda_plus);

/// The two reference constructions: (Y, Y, 0, lambda_plus, 1) and (-Y/2, 0, Y, 1/2, 1).
std::pair<AuditInstance, AuditInstance> construction_instances(double y_bound, double lambda_plus);

AuditReport evaluate_instance(double a, double b, double mu, const AuditInstance& instance,
                              double tolerance = 1e-9);

struct Witness {
  AuditInstance instance;
  AuditReport report;
};

struct SearchResult {
  std::size_t evaluated = 0;
  std::size_t grid_size = 0;
  std::vector<Witness> witnesses;  // margin ascending, then instance order
};

/// Structured corner grid first, then uniform random fill (seeded) up to
/// `budget` instances in total.
SearchResult search_violations(double a, double b, double mu, double lambda_plus, double y_bound, std::size_t budget,
                               std::uint64_t seed, double tolerance = 1e-9);

}  // namespace convexmix
