#include <immintrin.h>

#include "convexmix/kernels.hpp"

namespace convexmix::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

StatSums stat_sums(ColumnView cols) {
  const std::size_t n = cols.size();
  const double* y = cols.y.data();
  const double* y1 = cols.yhat1.data();
  const double* y2 = cols.yhat2.data();

  __m256d dd0 = _mm256_setzero_pd(), rd0 = _mm256_setzero_pd(), rr0 = _mm256_setzero_pd();
  __m256d dd1 = _mm256_setzero_pd(), rd1 = _mm256_setzero_pd(), rr1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d b0 = _mm256_loadu_pd(y2 + i);
    const __m256d b1 = _mm256_loadu_pd(y2 + i + 4);
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(y1 + i), b0);
    const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(y1 + i + 4), b1);
    const __m256d r0 = _mm256_sub_pd(_mm256_loadu_pd(y + i), b0);
    const __m256d r1 = _mm256_sub_pd(_mm256_loadu_pd(y + i + 4), b1);
    dd0 = _mm256_fmadd_pd(d0, d0, dd0);
    dd1 = _mm256_fmadd_pd(d1, d1, dd1);
    rd0 = _mm256_fmadd_pd(r0, d0, rd0);
    rd1 = _mm256_fmadd_pd(r1, d1, rd1);
    rr0 = _mm256_fmadd_pd(r0, r0, rr0);
    rr1 = _mm256_fmadd_pd(r1, r1, rr1);
  }
  StatSums s{hsum(_mm256_add_pd(dd0, dd1)), hsum(_mm256_add_pd(rd0, rd1)), hsum(_mm256_add_pd(rr0, rr1))};
  for (; i < n; ++i) {
    const double d = y1[i] - y2[i];
    const double r = y[i] - y2[i];
    s.s_dd += d * d;
    s.s_rd += r * d;
    s.s_rr += r * r;
  }
  return s;
}

double residual_loss(const ResidualColumns& res, double beta) {
  const std::size_t n = res.r.size();
  const double* r = res.r.data();
  const double* d = res.d.data();
  const __m256d vb = _mm256_set1_pd(beta);
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d e0 = _mm256_fnmadd_pd(vb, _mm256_loadu_pd(d + i), _mm256_loadu_pd(r + i));
    const __m256d e1 = _mm256_fnmadd_pd(vb, _mm256_loadu_pd(d + i + 4), _mm256_loadu_pd(r + i + 4));
    acc0 = _mm256_fmadd_pd(e0, e0, acc0);
    acc1 = _mm256_fmadd_pd(e1, e1, acc1);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) {
    const double e = r[i] - beta * d[i];
    acc += e * e;
  }
  return acc;
}

// Vectorized across beta: each lane owns one grid point and walks the
// samples in order, so the per-beta summation order matches the scalar loop.
void residual_loss_grid(const ResidualColumns& res, std::span<const double> betas, std::span<double> out) {
  const std::size_t n = res.r.size();
  const double* r = res.r.data();
  const double* d = res.d.data();
  std::size_t j = 0;
  for (; j + 8 <= betas.size(); j += 8) {
    const __m256d b0 = _mm256_loadu_pd(betas.data() + j);
    const __m256d b1 = _mm256_loadu_pd(betas.data() + j + 4);
    __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
    for (std::size_t i = 0; i < n; ++i) {
      const __m256d vr = _mm256_broadcast_sd(r + i);
      const __m256d vd = _mm256_broadcast_sd(d + i);
      const __m256d e0 = _mm256_fnmadd_pd(b0, vd, vr);
      const __m256d e1 = _mm256_fnmadd_pd(b1, vd, vr);
      acc0 = _mm256_fmadd_pd(e0, e0, acc0);
      acc1 = _mm256_fmadd_pd(e1, e1, acc1);
    }
    _mm256_storeu_pd(out.data() + j, acc0);
    _mm256_storeu_pd(out.data() + j + 4, acc1);
  }
  for (; j < betas.size(); ++j) out[j] = avx2::residual_loss(res, betas[j]);
}

}  // namespace convexmix::kernels::avx2
