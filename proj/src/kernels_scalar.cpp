#include "convexmix/kernels.hpp"

namespace convexmix::kernels::scalar {

StatSums stat_sums(ColumnView cols) {
  StatSums s;
  const std::size_t n = cols.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double d = cols.yhat1[i] - cols.yhat2[i];
    const double r = cols.y[i] - cols.yhat2[i];
    s.s_dd += d * d;
    s.s_rd += r * d;
    s.s_rr += r * r;
  }
  return s;
}

double residual_loss(const ResidualColumns& res, double beta) {
  double acc = 0.0;
  const std::size_t n = res.r.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double e = res.r[i] - beta * res.d[i];
    acc += e * e;
  }
  return acc;
}

void residual_loss_grid(const ResidualColumns& res, std::span<const double> betas, std::span<double> out) {
  for (std::size_t j = 0; j < betas.size(); ++j) out[j] = scalar::residual_loss(res, betas[j]);
}

}  // namespace convexmix::kernels::scalar
