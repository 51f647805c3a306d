#include <doctest.h>

#include <cmath>
#include <random>

#include "convexmix/errors.hpp"
#include "convexmix/oracle.hpp"
#include "convexmix/rng.hpp"
#include "convexmix/signals.hpp"

using namespace convexmix;

namespace {

// Independent oracle: the defining sum, one sample at a time.
double brute_loss(const std::vector<SignalSample>& seq, double beta) {
  double acc = 0.0;
  for (const auto& s : seq) {
    const double e = s.y - (beta * s.yhat1 + (1.0 - beta) * s.yhat2);
    acc += e * e;
  }
  return acc;
}

std::vector<SignalSample> random_seq(std::size_t n, std::uint64_t seed, double Y = 1.0) {
  std::mt19937_64 rng(seed);
  std::vector<SignalSample> seq(n);
  for (auto& s : seq) s = {uniform(rng, -Y, Y), uniform(rng, -Y, Y), uniform(rng, -Y, Y)};
  return seq;
}

OracleStats streamed(const std::vector<SignalSample>& seq) {
  OracleStats st;
  for (const auto& s : seq) st = accumulate(st, s);
  return st;
}

}  // namespace

TEST_CASE("accumulate") {
  const auto st = accumulate(OracleStats{}, {0.5, 0.5, -0.5});
  CHECK(st.n == 1);
  CHECK(st.s_dd == 1.0);
  CHECK(st.s_rd == 1.0);
  CHECK(st.s_rr == 1.0);

  const auto same = accumulate(st, {0.3, 0.2, 0.2});
  CHECK(same.s_dd == st.s_dd);
  CHECK(same.s_rd == st.s_rd);

  const SignalSample s{0.1, -0.4, 0.25};
  const auto one = accumulate(OracleStats{}, s);
  const auto two = accumulate(one, s);
  CHECK(two.s_dd == 2 * one.s_dd);
  CHECK(two.s_rd == 2 * one.s_rd);
  CHECK(two.s_rr == 2 * one.s_rr);
  CHECK(merge(one, one) == two);
}

TEST_CASE("loss_at_beta matches direct summation") {
  const auto seq = random_seq(300, 5);
  const auto st = streamed(seq);
  for (double beta = 0.0; beta <= 1.0; beta += 0.05) {
    CHECK(loss_at_beta(st, beta) == doctest::Approx(brute_loss(seq, beta)).epsilon(1e-9));
    CHECK(direct_loss(seq, beta) == doctest::Approx(brute_loss(seq, beta)).epsilon(1e-12));
  }
  CHECK(loss_at_beta(st, 0.0) == st.s_rr);
  CHECK_THROWS_AS(loss_at_beta(st, 1.1), DomainError);
  CHECK_THROWS_AS(loss_at_beta(st, -0.1), DomainError);
}

TEST_CASE("case 1 and case 2 optima") {
  const auto c1 = generate(SequenceSpec::case1(10000));
  const auto b1 = best_beta(streamed(c1));
  CHECK(b1.beta == 1.0);
  CHECK(b1.loss == 0.0);
  CHECK(loss_at_beta(streamed(c1), 1.0) == 0.0);
  const auto g1 = grid_best_beta(c1, 1e-2);
  CHECK(g1.beta == 1.0);
  CHECK(g1.loss == 0.0);

  const auto c2 = generate(SequenceSpec::case2(10000));
  const auto st2 = streamed(c2);
  const auto b2 = best_beta(st2);
  // s_rd / s_dd = 1.04 / (1.04^2 + 0.04^2)
  CHECK(b2.beta == doctest::Approx(1.04 / 1.0832).epsilon(1e-12));
  CHECK(b2.loss > 0.0);
  const double expected = 5000.0 * (0.0016 * 0.96 * 0.96 + (1 - 1.04 * 0.96) * (1 - 1.04 * 0.96));
  CHECK(brute_loss(c2, 0.96) == doctest::Approx(expected).epsilon(1e-10));
  CHECK(loss_at_beta(st2, 0.96) == doctest::Approx(expected).epsilon(1e-9));
  const auto g2 = grid_best_beta(c2, 1e-4);
  CHECK(std::abs(g2.beta - b2.beta) <= 1e-4);
}

TEST_CASE("degenerate and tie handling") {
  std::vector<SignalSample> seq;
  for (int i = 0; i < 10; ++i) seq.push_back({0.1 * i - 0.3, 0.2, 0.2});
  const auto st = streamed(seq);
  const auto b = best_beta(st);
  CHECK(b.degenerate);
  CHECK(b.beta == 0.5);
  CHECK(b.loss == doctest::Approx(st.s_rr));

  std::vector<SignalSample> flat(20, SignalSample{0.7, 0.7, 0.7});
  const auto g = grid_best_beta(flat, 0.05);
  CHECK(g.beta == 0.0);
  CHECK(g.loss == 0.0);

  CHECK_THROWS_AS(best_beta(OracleStats{}), DomainError);
  CHECK_THROWS_AS(grid_best_beta({}, 0.01), DomainError);
  CHECK_THROWS_AS(grid_best_beta(flat, 0.5), DomainError);
  CHECK_THROWS_AS(grid_best_beta(flat, 0.0), DomainError);
}

TEST_CASE("unconstrained minimizer outside [0,1] is clamped") {
  // yhat1 is the anti-signal: best beta is 0.
  std::vector<SignalSample> seq;
  for (int i = 0; i < 40; ++i) {
    const double v = (i % 2 ? 0.5 : -0.5);
    seq.push_back({v, -v, 0.9 * v});
  }
  const auto b = best_beta(streamed(seq));
  CHECK(b.beta == 0.0);
  // yhat2 overshoots the other way: best beta is 1.
  std::vector<SignalSample> seq2;
  for (int i = 0; i < 40; ++i) {
    const double v = (i % 2 ? 0.5 : -0.5);
    seq2.push_back({v, 0.9 * v, -v});
  }
  CHECK(best_beta(streamed(seq2)).beta == 1.0);
}

TEST_CASE("property: oracle agreement, prefix optimality, convexity, Cauchy-Schwarz") {
  std::mt19937_64 rng(99);
  for (std::uint64_t trial = 0; trial < 40; ++trial) {
    const auto seq = random_seq(50 + 10 * trial, 1000 + trial);
    const auto st = streamed(seq);
    REQUIRE(st.s_rd * st.s_rd <= st.s_dd * st.s_rr * (1 + 1e-12));
    const auto closed = best_beta(st);
    const auto grid = grid_best_beta(seq, 1e-3);
    REQUIRE(std::abs(closed.beta - grid.beta) <= 1e-3);
    REQUIRE(closed.loss <= grid.loss * (1 + 1e-12) + 1e-12);

    const auto batch = stats_of(seq);
    REQUIRE(batch.n == st.n);
    REQUIRE(batch.s_dd == doctest::Approx(st.s_dd).epsilon(1e-12));
    REQUIRE(batch.s_rd == doctest::Approx(st.s_rd).epsilon(1e-12));

    OracleStats prefix;
    for (std::size_t m = 0; m < seq.size(); m += 7) {
      prefix = OracleStats{};
      for (std::size_t i = 0; i <= m; ++i) prefix = accumulate(prefix, seq[i]);
      const auto b = best_beta(prefix);
      for (int k = 0; k < 100; ++k) {
        const double beta = unit_uniform(rng);
        REQUIRE(b.loss <= loss_at_beta(prefix, beta) + 1e-12);
      }
    }

    for (int k = 0; k < 20; ++k) {
      const double lo = unit_uniform(rng) * 0.8;
      const double h = 0.1 * unit_uniform(rng);
      const double second = loss_at_beta(st, lo) - 2 * loss_at_beta(st, lo + h) + loss_at_beta(st, lo + 2 * h);
      REQUIRE(second >= -1e-9);
    }

    const std::size_t cut = seq.size() / 3;
    OracleStats left, right;
    for (std::size_t i = 0; i < cut; ++i) left = accumulate(left, seq[i]);
    for (std::size_t i = cut; i < seq.size(); ++i) right = accumulate(right, seq[i]);
    const auto joined = merge(left, right);
    REQUIRE(joined.n == st.n);
    REQUIRE(joined.s_rr == doctest::Approx(st.s_rr).epsilon(1e-12));
  }
}
