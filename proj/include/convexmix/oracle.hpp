#pragma once

// Hindsight-optimal fixed convex combination.
//
// With d_t = yhat1_t - yhat2_t and r_t = y_t - yhat2_t the loss of the fixed
// mixture beta is a quadratic in beta,
//   L(beta) = s_rr - 2 beta s_rd + beta^2 s_dd,
// so three running sums are enough to answer "best beta so far" at every
// prefix. grid_best_beta() is the brute-force cross-check: it never touches
// the sums and evaluates the per-sample residuals directly.

#include <cstddef>
#include <span>

#include "convexmix/mixture.hpp"

namespace convexmix {

struct OracleStats {
  std::size_t n = 0;
  double s_dd = 0.0;
  double s_rd = 0.0;
  double s_rr = 0.0;

  OracleStats& operator+=(const OracleStats& other) noexcept;
  friend bool operator==(const OracleStats&, const OracleStats&) = default;
};

OracleStats accumulate(OracleStats stats, const SignalSample& sample) noexcept;
OracleStats merge(const OracleStats& lhs, const OracleStats& rhs) noexcept;
/// Batch accumulation through the SIMD kernels.
OracleStats stats_of(std::span<const SignalSample> sequence);

/// Closed-form loss of the fixed mixture beta in [0,1]; clamped at 0 against cancellation.
double loss_at_beta(const OracleStats& stats, double beta);

/// Direct sum of (y_t - beta yhat1_t - (1-beta) yhat2_t)^2.
double direct_loss(std::span<const SignalSample> sequence, double beta);

struct BestBeta {
  double beta = 0.5;
  double loss = 0.0;
  bool degenerate = false;  // s_dd == 0: every beta is optimal
};

BestBeta best_beta(const OracleStats& stats);

/// Minimizer over {0, res, 2 res, ..., 1}; ties go to the smaller beta.
BestBeta grid_best_beta(std::span<const SignalSample> sequence, double resolution);

}  // namespace convexmix
