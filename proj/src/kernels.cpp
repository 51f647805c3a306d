#include "convexmix/kernels.hpp"

#include <cstdlib>
#include <string_view>

#include "convexmix/errors.hpp"

namespace convexmix::kernels {

SignalColumns SignalColumns::from_samples(std::span<const SignalSample> samples) {
  SignalColumns c;
  c.y.reserve(samples.size());
  c.yhat1.reserve(samples.size());
  c.yhat2.reserve(samples.size());
  for (const auto& s : samples) {
    c.y.push_back(s.y);
    c.yhat1.push_back(s.yhat1);
    c.yhat2.push_back(s.yhat2);
  }
  return c;
}

ResidualColumns ResidualColumns::from_columns(ColumnView cols) {
  ResidualColumns res;
  res.r.resize(cols.size());
  res.d.resize(cols.size());
  for (std::size_t i = 0; i < cols.size(); ++i) {
    res.r[i] = cols.y[i] - cols.yhat2[i];
    res.d[i] = cols.yhat1[i] - cols.yhat2[i];
  }
  return res;
}

const char* isa_name(Isa isa) noexcept { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool avx2_supported() noexcept {
#if defined(CONVEXMIX_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

Isa resolve_isa() noexcept {
  if (const char* env = std::getenv("CONVEXMIX_SIMD"); env && std::string_view(env) == "scalar") return Isa::scalar;
  return avx2_supported() ? Isa::avx2 : Isa::scalar;
}

}  // namespace

Isa active_isa() noexcept {
  static const Isa isa = resolve_isa();
  return isa;
}

StatSums stat_sums(ColumnView cols) {
#if defined(CONVEXMIX_HAVE_AVX2)
  if (active_isa() == Isa::avx2) return avx2::stat_sums(cols);
#endif
  return scalar::stat_sums(cols);
}

double residual_loss(const ResidualColumns& res, double beta) {
#if defined(CONVEXMIX_HAVE_AVX2)
  if (active_isa() == Isa::avx2) return avx2::residual_loss(res, beta);
#endif
  return scalar::residual_loss(res, beta);
}

void residual_loss_grid(const ResidualColumns& res, std::span<const double> betas, std::span<double> out) {
  if (out.size() != betas.size()) throw DomainError("residual_loss_grid: output length mismatch");
#if defined(CONVEXMIX_HAVE_AVX2)
  if (active_isa() == Isa::avx2) return avx2::residual_loss_grid(res, betas, out);
#endif
  scalar::residual_loss_grid(res, betas, out);
}

}  // namespace convexmix::kernels
