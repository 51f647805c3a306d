#include "convexmix/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "convexmix/errors.hpp"
#include "convexmix/kernels.hpp"

namespace convexmix {

OracleStats& OracleStats::operator+=(const OracleStats& other) noexcept {
  n += other.n;
  s_dd += other.s_dd;
  s_rd += other.s_rd;
  s_rr += other.s_rr;
  return *this;
}

OracleStats accumulate(OracleStats stats, const SignalSample& sample) noexcept {
  const double d = sample.yhat1 - sample.yhat2;
  const double r = sample.y - sample.yhat2;
  stats.n += 1;
  stats.s_dd += d * d;
  stats.s_rd += r * d;
  stats.s_rr += r * r;
  return stats;
}

OracleStats merge(const OracleStats& lhs, const OracleStats& rhs) noexcept {
  OracleStats out = lhs;
  out += rhs;
  return out;
}

OracleStats stats_of(std::span<const SignalSample> sequence) {
  const auto cols = kernels::SignalColumns::from_samples(sequence);
  const auto sums = kernels::stat_sums(cols.view());
  return OracleStats{sequence.size(), sums.s_dd, sums.s_rd, sums.s_rr};
}

namespace {

void check_beta(double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("beta must lie in [0,1]");
}

}  // namespace

double loss_at_beta(const OracleStats& stats, double beta) {
  check_beta(beta);
  return std::max(0.0, stats.s_rr - 2.0 * beta * stats.s_rd + beta * beta * stats.s_dd);
}

double direct_loss(std::span<const SignalSample> sequence, double beta) {
  check_beta(beta);
  const auto cols = kernels::SignalColumns::from_samples(sequence);
  const auto res = kernels::ResidualColumns::from_columns(cols.view());
  return kernels::residual_loss(res, beta);
}

BestBeta best_beta(const OracleStats& stats) {
  if (stats.n == 0) throw DomainError("best_beta: no samples accumulated");
  if (stats.s_dd == 0.0) return BestBeta{0.5, std::max(0.0, stats.s_rr), true};
  const double beta = std::clamp(stats.s_rd / stats.s_dd, 0.0, 1.0);
  return BestBeta{beta, loss_at_beta(stats, beta), false};
}

BestBeta grid_best_beta(std::span<const SignalSample> sequence, double resolution) {
  if (sequence.empty()) throw DomainError("grid_best_beta: empty sequence");
  if (!(resolution > 0.0 && resolution <= 0.1)) throw DomainError("grid_best_beta: resolution must lie in (0, 0.1]");

  const auto steps = static_cast<std::size_t>(std::ceil(1.0 / resolution - 1e-9));
  std::vector<double> betas(steps + 1);
  for (std::size_t i = 0; i < steps; ++i) betas[i] = static_cast<double>(i) * resolution;
  betas[steps] = 1.0;

  const auto cols = kernels::SignalColumns::from_samples(sequence);
  const auto res = kernels::ResidualColumns::from_columns(cols.view());
  std::vector<double> losses(betas.size());
  kernels::residual_loss_grid(res, betas, losses);

  std::size_t best = 0;
  for (std::size_t i = 1; i < losses.size(); ++i) {
    if (losses[i] < losses[best]) best = i;
  }
  return BestBeta{betas[best], losses[best], false};
}

}  // namespace convexmix
