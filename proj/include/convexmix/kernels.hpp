#pragma once

// Data-parallel inner loops used by the hindsight oracle.
//
// Every kernel has a scalar reference in `kernels::scalar` and, on x86-64,
// an AVX2/FMA variant in `kernels::avx2`. The unqualified entry points
// dispatch at runtime on CPU support; setting CONVEXMIX_SIMD=scalar in the
// environment pins the scalar path. Variants differ only in summation order
// and FMA rounding, never in the quantity computed.

#include <cstddef>
#include <span>
#include <vector>

#include "convexmix/mixture.hpp"

namespace convexmix::kernels {

/// Structure-of-arrays view of a signal sequence. All spans share one length.
struct ColumnView {
  std::span<const double> y;
  std::span<const double> yhat1;
  std::span<const double> yhat2;

  std::size_t size() const noexcept { return y.size(); }
};

struct SignalColumns {
  std::vector<double> y;
  std::vector<double> yhat1;
  std::vector<double> yhat2;

  static SignalColumns from_samples(std::span<const SignalSample> samples);
  ColumnView view() const noexcept { return {y, yhat1, yhat2}; }
};

/// Residual form of a sequence: r = y - yhat2 and d = yhat1 - yhat2, so the
/// residual of the fixed mixture beta is r - beta * d.
struct ResidualColumns {
  std::vector<double> r;
  std::vector<double> d;

  static ResidualColumns from_columns(ColumnView cols);
};

struct StatSums {
  double s_dd = 0.0;
  double s_rd = 0.0;
  double s_rr = 0.0;
};

enum class Isa { scalar, avx2 };

const char* isa_name(Isa isa) noexcept;
bool avx2_supported() noexcept;
/// ISA used by the dispatching entry points (resolved once per process).
Isa active_isa() noexcept;

namespace scalar {
StatSums stat_sums(ColumnView cols);
double residual_loss(const ResidualColumns& res, double beta);
void residual_loss_grid(const ResidualColumns& res, std::span<const double> betas, std::span<double> out);
}  // namespace scalar

#if defined(CONVEXMIX_HAVE_AVX2)
namespace avx2 {
StatSums stat_sums(ColumnView cols);
double residual_loss(const ResidualColumns& res, double beta);
void residual_loss_grid(const ResidualColumns& res, std::span<const double> betas, std::span<double> out);
}  // namespace avx2
#endif

StatSums stat_sums(ColumnView cols);
double residual_loss(const ResidualColumns& res, double beta);
/// out[j] = sum_t (r_t - betas[j] * d_t)^2. `out` must be as long as `betas`.
void residual_loss_grid(const ResidualColumns& res, std::span<const double> betas, std::span<double> out);

}  // namespace convexmix::kernels
