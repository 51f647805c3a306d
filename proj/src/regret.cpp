#include "convexmix/regret.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "convexmix/errors.hpp"

namespace convexmix {

namespace {

void check_lambda_plus(double lambda_plus) {
  if (!(lambda_plus > 0.0 && lambda_plus < 0.5)) throw DomainError("lambda_plus must lie in (0, 1/2)");
}

// 1 - 4as carries rounding of a few ulps from a and s. Below this it is a
// double root, not a complex pair.
constexpr double kDiscSlack = 16.0 * std::numeric_limits<double>::epsilon();

double discriminant(const TheoremConstants& c) {
  const double disc = 1.0 - 4.0 * c.a * c.s;
  return disc < 0.0 && disc >= -kDiscSlack ? 0.0 : disc;
}

// The roots move by about d(disc) / (4 mu s sqrt(disc)), so near a double
// root (lambda_plus close to 1/2) the achievable agreement degrades.
double root_tolerance(const TheoremConstants& c, double disc, double tol) {
  const double root = std::max(std::sqrt(disc), std::sqrt(kDiscSlack));
  return tol + kDiscSlack / (4.0 * c.mu * c.s * root);
}

void check_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(name) + " must be a positive finite number");
}

bool near_rel(double x, double y, double tol) { return std::abs(x - y) <= tol * std::max(1.0, std::abs(y)); }

}  // namespace

double z_of(double lambda_plus) {
  check_lambda_plus(lambda_plus);
  const double k = 4.0 * lambda_plus * (1.0 - lambda_plus);
  return (1.0 - k) / (1.0 + k);
}

TheoremConstants constants_from_eps(double eps, double y_bound, double lambda_plus) {
  check_positive(eps, "eps");
  check_positive(y_bound, "y_bound");
  TheoremConstants c;
  c.y_bound = y_bound;
  c.lambda_plus = lambda_plus;
  c.z = z_of(lambda_plus);
  c.eps = eps;
  const double y2 = y_bound * y_bound;
  c.b = eps / y2;
  c.a = (1.0 - c.z * c.z) * eps / (y2 * (2.0 * eps + 1.0));
  c.s = y2 / 2.0 + 1.0 / (4.0 * c.b);
  c.mu = (4.0 * eps / (2.0 * eps + 1.0)) * (2.0 + 2.0 * c.z) / y2;
  if (auto failures = constant_identity_failures(c); !failures.empty()) {
    throw NumericError("constants_from_eps: identity check failed (" + failures.front() + ")");
  }
  return c;
}

double mu_supremum(double y_bound, double lambda_plus) {
  check_positive(y_bound, "y_bound");
  return 2.0 * (2.0 + 2.0 * z_of(lambda_plus)) / (y_bound * y_bound);
}

double eps_from_mu(double mu, double y_bound, double lambda_plus) {
  check_positive(mu, "mu");
  const double sup = mu_supremum(y_bound, lambda_plus);
  if (mu >= sup) {
    throw DomainError("eps_from_mu: mu must be below the supremum 2(2+2z)/Y^2 = " + std::to_string(sup));
  }
  const double c = sup / 2.0;
  return mu / (4.0 * c - 2.0 * mu);
}

double regret_multiplier(const TheoremConstants& c) { return (2.0 * c.eps + 1.0) / (1.0 - c.z * c.z); }

std::vector<std::string> constant_identity_failures(const TheoremConstants& c, double tol) {
  std::vector<std::string> out;
  const double one_minus_z2 = 1.0 - c.z * c.z;
  if (!(std::abs(4.0 * c.a * c.s - one_minus_z2) <= tol)) out.emplace_back("4as = 1 - z^2");
  if (!(c.s > 0.0) || !near_rel(c.mu, (2.0 + 2.0 * c.z) / c.s, tol)) out.emplace_back("mu = (2 + 2z)/s");
  if (!near_rel(c.b, c.eps / (c.y_bound * c.y_bound), tol)) out.emplace_back("b = eps/Y^2");
  const double disc = discriminant(c);
  if (disc < 0.0 || !(c.mu > 0.0) || !(c.s > 0.0)) {
    out.emplace_back("real sufficiency roots");
    return out;
  }
  const double root = std::sqrt(disc);
  const double k1 = (1.0 + root) / (2.0 * c.mu * c.s);
  const double k2 = (1.0 - root) / (2.0 * c.mu * c.s);
  const double k0 = c.lambda_plus * (1.0 - c.lambda_plus);
  const double root_tol = root_tolerance(c, disc, tol);
  if (!(std::abs(k1 - 0.25) <= root_tol)) out.emplace_back("k1 = 1/4");
  if (!(k2 <= k0 + root_tol)) out.emplace_back("k2 <= lambda_plus(1 - lambda_plus)");
  return out;
}

double kl(ProbPair u, ProbPair w) {
  auto valid = [](ProbPair p) {
    return p.first >= 0.0 && p.first <= 1.0 && p.second >= 0.0 && p.second <= 1.0 &&
           std::abs(p.first + p.second - 1.0) <= 1e-12;
  };
  if (!valid(u) || !valid(w)) throw DomainError("kl: arguments must be probability pairs");
  double out = 0.0;
  for (auto [ui, wi] : {std::pair{u.first, w.first}, std::pair{u.second, w.second}}) {
    if (ui == 0.0) continue;
    if (wi == 0.0) return std::numeric_limits<double>::infinity();
    out += ui * std::log(ui / wi);
  }
  return std::max(0.0, out);
}

double kl_progress(double beta, double lambda_t, double lambda_t1) {
  if (!(lambda_t > 0.0 && lambda_t < 1.0 && lambda_t1 > 0.0 && lambda_t1 < 1.0)) {
    throw DomainError("kl_progress: weights must lie in (0,1)");
  }
  if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("kl_progress: beta must lie in [0,1]");
  return beta * std::log(lambda_t1 / lambda_t) + (1.0 - beta) * std::log((1.0 - lambda_t1) / (1.0 - lambda_t));
}

double per_step_margin(const TheoremConstants& c, double beta, double lambda_t, double lambda_t1, double e_t,
                       double e_beta_t) {
  const double progress = kl_progress(beta, lambda_t, lambda_t1);
  const auto u = ProbPair::of(beta);
  const double before = kl(u, ProbPair::of(lambda_t));
  const double after = kl(u, ProbPair::of(lambda_t1));
  const double scale = std::max({1.0, before, after});
  if (std::abs(progress - (before - after)) > 1e-12 * scale) {
    throw NumericError("per_step_margin: log-ratio progress disagrees with KL difference");
  }
  return progress - (c.a * e_t * e_t - c.b * e_beta_t * e_beta_t);
}

SufficiencyRoots sufficiency_roots(const TheoremConstants& c) {
  const double disc = discriminant(c);
  if (disc < 0.0) throw NumericError("sufficiency_roots: 1 - 4as < 0, roots are complex");
  if (!(c.mu > 0.0 && c.s > 0.0)) throw DomainError("sufficiency_roots: mu and s must be positive");
  SufficiencyRoots r;
  r.mu = c.mu;
  r.s = c.s;
  r.a = c.a;
  const double root = std::sqrt(disc);
  r.k1 = (1.0 + root) / (2.0 * c.mu * c.s);
  r.k2 = (1.0 - root) / (2.0 * c.mu * c.s);
  r.k1_covers_quarter = r.k1 >= 0.25 - 1e-12;
  r.k2_covers_boundary = r.k2 <= c.lambda_plus * (1.0 - c.lambda_plus) + 1e-12;
  return r;
}

double worst_case_divergence(double lambda_init) {
  if (!(lambda_init > 0.0 && lambda_init < 1.0)) throw DomainError("initial weight must lie in (0,1)");
  // Convex in beta, so the maximum sits at beta = 0 or beta = 1.
  return std::max(-std::log(lambda_init), -std::log1p(-lambda_init));
}

RegretBound regret_and_bound(double l_alg, double l_best, const TheoremConstants& c, std::size_t n,
                             double lambda_init, std::optional<double> beta) {
  if (!(l_alg >= 0.0) || !(l_best >= 0.0)) throw DomainError("regret_and_bound: losses must be non-negative");
  if (n == 0) throw DomainError("regret_and_bound: n must be at least 1");
  const double divergence =
      beta ? kl(ProbPair::of(*beta), ProbPair::of(lambda_init)) : worst_case_divergence(lambda_init);
  RegretBound out;
  out.regret = l_alg - regret_multiplier(c) * l_best;
  out.bound_total = divergence / c.a;
  out.bound_normalized = out.bound_total / static_cast<double>(n);
  return out;
}

}  // namespace convexmix
