#pragma once

// Constants and inequalities of the deterministic regret guarantee.
//
// For a tolerance eps > 0 and boundary lambda_plus:
//   z  = (1 - 4k0) / (1 + 4k0),          k0 = lambda_plus (1 - lambda_plus)
//   b  = eps / Y^2
//   a  = (1 - z^2) eps / (Y^2 (2 eps + 1))
//   s  = Y^2 / 2 + 1 / (4b)
//   mu = (4 eps / (2 eps + 1)) (2 + 2z) / Y^2
// These make 4as = 1 - z^2 and mu = (2 + 2z) / s, which places the roots of
//   H(k) = k^2 mu^2 s - mu k + a
// exactly at k1 = 1/4 and k2 = k0. Whenever lambda_t stays in
// [lambda_plus, 1 - lambda_plus] the per-step KL progress then dominates
// a e_t^2 - b e_beta_t^2, and telescoping gives
//   L_n(alg) - (b/a) L_n(beta) <= D(u || w_1) / a.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace convexmix {

struct TheoremConstants {
  double y_bound = 0.0;
  double lambda_plus = 0.0;
  double z = 0.0;
  double eps = 0.0;
  double mu = 0.0;
  double a = 0.0;
  double b = 0.0;
  double s = 0.0;
};

double z_of(double lambda_plus);

TheoremConstants constants_from_eps(double eps, double y_bound, double lambda_plus);

/// Supremum of the mu(eps) map, 2 (2 + 2z) / Y^2. No eps exists at or above it.
double mu_supremum(double y_bound, double lambda_plus);
double eps_from_mu(double mu, double y_bound, double lambda_plus);

/// Multiplier on the comparator loss in the regret, (2 eps + 1) / (1 - z^2) = b / a.
double regret_multiplier(const TheoremConstants& c);

/// Names of the violated identities (4as = 1-z^2, mu = (2+2z)/s, k1 = 1/4,
/// k2 <= k0, b = eps/Y^2); empty when the constants are consistent.
std::vector<std::string> constant_identity_failures(const TheoremConstants& c, double tol = 1e-12);

/// A two-point probability distribution [first, second].
struct ProbPair {
  double first = 0.5;
  double second = 0.5;

  static ProbPair of(double p) noexcept { return {p, 1.0 - p}; }
};

/// Relative entropy D(u || w) in nats with 0 ln 0 = 0. Returns +infinity
/// when some w_i = 0 while u_i > 0.
double kl(ProbPair u, ProbPair w);

/// beta ln(l1/l0) + (1-beta) ln((1-l1)/(1-l0)), the one-step decrease of D(u||w).
double kl_progress(double beta, double lambda_t, double lambda_t1);

/// progress - (a e_t^2 - b e_beta^2). Non-negative means the per-step
/// inequality holds. Throws NumericError if the log-ratio progress and the
/// KL difference disagree beyond 1e-12.
double per_step_margin(const TheoremConstants& c, double beta, double lambda_t, double lambda_t1, double e_t,
                       double e_beta_t);

struct SufficiencyRoots {
  double k1 = 0.0;
  double k2 = 0.0;
  double mu = 0.0;
  double s = 0.0;
  double a = 0.0;
  bool k1_covers_quarter = false;   // k1 >= 1/4
  bool k2_covers_boundary = false;  // k2 <= lambda_plus (1 - lambda_plus)

  double H(double k) const noexcept { return k * k * mu * mu * s - mu * k + a; }
};

SufficiencyRoots sufficiency_roots(const TheoremConstants& c);

struct RegretBound {
  double regret = 0.0;
  double bound_total = 0.0;
  double bound_normalized = 0.0;
};

/// Worst case over beta of D([beta,1-beta] || [lambda, 1-lambda]); ln 2 at lambda = 1/2.
double worst_case_divergence(double lambda_init);

/// regret = l_alg - multiplier * l_best. bound_total = D(u || w_1) / a at the
/// given comparator beta, or the beta-free worst case when beta is empty.
RegretBound regret_and_bound(double l_alg, double l_best, const TheoremConstants& c, std::size_t n,
                             double lambda_init = 0.5, std::optional<double> beta = std::nullopt);

}  // namespace convexmix
