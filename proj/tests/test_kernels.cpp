#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "convexmix/kernels.hpp"
#include "convexmix/rng.hpp"

using namespace convexmix;
using namespace convexmix::kernels;

namespace {

SignalColumns random_columns(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SignalColumns c;
  for (std::size_t i = 0; i < n; ++i) {
    c.y.push_back(uniform(rng, -1, 1));
    c.yhat1.push_back(uniform(rng, -1, 1));
    c.yhat2.push_back(uniform(rng, -1, 1));
  }
  return c;
}

bool close(double a, double b, double rel = 1e-12) { return std::abs(a - b) <= rel * std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("scalar kernels match a hand loop") {
  const auto c = random_columns(37, 1);
  double dd = 0, rd = 0, rr = 0, loss = 0;
  for (std::size_t i = 0; i < 37; ++i) {
    const double d = c.yhat1[i] - c.yhat2[i];
    const double r = c.y[i] - c.yhat2[i];
    dd += d * d;
    rd += r * d;
    rr += r * r;
    const double e = c.y[i] - (0.3 * c.yhat1[i] + 0.7 * c.yhat2[i]);
    loss += e * e;
  }
  const auto s = scalar::stat_sums(c.view());
  CHECK(s.s_dd == dd);
  CHECK(s.s_rd == rd);
  CHECK(s.s_rr == rr);
  const auto res = ResidualColumns::from_columns(c.view());
  CHECK(close(scalar::residual_loss(res, 0.3), loss, 1e-13));
}

TEST_CASE("dispatch reports a usable ISA") {
  const Isa isa = active_isa();
  CHECK((isa == Isa::scalar || avx2_supported()));
  CHECK(std::string(isa_name(isa)).size() > 0);
}

#if defined(CONVEXMIX_HAVE_AVX2)
TEST_CASE("avx2 kernels agree with scalar reference") {
  if (!avx2_supported()) {
    MESSAGE("AVX2/FMA not available on this CPU; skipping equivalence");
    return;
  }
  // Lengths straddle the 8-wide main loop and its scalar tail.
  for (std::size_t n : {0u, 1u, 3u, 7u, 8u, 9u, 15u, 16u, 17u, 100u, 1023u, 4099u}) {
    CAPTURE(n);
    const auto c = random_columns(n, 100 + n);
    const auto a = avx2::stat_sums(c.view());
    const auto s = scalar::stat_sums(c.view());
    CHECK(close(a.s_dd, s.s_dd));
    CHECK(close(a.s_rd, s.s_rd));
    CHECK(close(a.s_rr, s.s_rr));

    const auto res = ResidualColumns::from_columns(c.view());
    std::vector<double> betas;
    for (int j = 0; j <= 21; ++j) betas.push_back(j / 21.0);
    std::vector<double> grid_a(betas.size()), grid_s(betas.size());
    avx2::residual_loss_grid(res, betas, grid_a);
    scalar::residual_loss_grid(res, betas, grid_s);
    for (std::size_t j = 0; j < betas.size(); ++j) {
      CHECK(close(grid_a[j], grid_s[j]));
      CHECK(close(avx2::residual_loss(res, betas[j]), grid_s[j]));
    }
  }
}

TEST_CASE("avx2 kernels are exact on exactly representable data") {
  if (!avx2_supported()) return;
  SignalColumns c;
  for (int t = 1; t <= 1001; ++t) {
    c.y.push_back(0.5);
    c.yhat1.push_back(0.5);
    c.yhat2.push_back(t % 2 ? -0.5 : 0.5);
  }
  const auto a = avx2::stat_sums(c.view());
  CHECK(a.s_dd == 501.0);
  CHECK(a.s_rd == 501.0);
  CHECK(a.s_rr == 501.0);
  const auto res = ResidualColumns::from_columns(c.view());
  CHECK(avx2::residual_loss(res, 1.0) == 0.0);
  const double betas[] = {1, 1, 1, 1, 1, 1, 1, 1, 1};
  double out[9];
  avx2::residual_loss_grid(res, betas, out);
  for (double v : out) CHECK(v == 0.0);
}
#endif
