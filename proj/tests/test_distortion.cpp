#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"

using namespace hcantor;
using fixtures::q;

namespace {

// Perturbed ternary written out by hand: branch 1 carries amplitude a, branch 2 is x -> 3x - 2.
struct HandTernary {
  double a;
  double S(int sym, double x) const {
    if (sym == 1) return 3 * x + a * (1.0 / 3.0) * std::sin(2 * std::numbers::pi * 3 * x) / (2 * std::numbers::pi);
    return 3 * x - 2;
  }
  double dS(int sym, double x) const {
    if (sym == 1) return 3 + a * std::cos(2 * std::numbers::pi * 3 * x);
    return 3;
  }
  // sup - inf of log (S^m)' over a dense grid of I, following the block address
  double distortion(const Word& address, double lo, double hi, int samples) const {
    double mn = 1e300, mx = -1e300;
    for (int n = 0; n <= samples; ++n) {
      double x = lo + (hi - lo) * n / samples, acc = 0;
      for (int sym : address) {
        acc += std::log(dS(sym, x));
        x = S(sym, x);
      }
      mn = std::min(mn, acc);
      mx = std::max(mx, acc);
    }
    return mx - mn;
  }
};

}  // namespace

TEST(Nonlinearity, AffineIsZero) {
  EXPECT_EQ(nonlinearity(fixtures::ternary(), 64).value, 0.0);
  EXPECT_EQ(nonlinearity(fixtures::two_scale(), 2).value, 0.0);
  EXPECT_EQ(nonlinearity(fixtures::three_branch(), 9).value, 0.0);
}

TEST(Nonlinearity, PerturbedMatchesDerivativeExtremes) {
  const auto v = nonlinearity(fixtures::perturbed(), 10000);
  EXPECT_GT(v.value, 0.0);
  EXPECT_LT(v.value, 0.01);
  EXPECT_NEAR(v.value, std::log(3.01 / 2.99), 1e-12);
  EXPECT_EQ(v.grid, 10000u);
  // a coarse grid that misses t = 1/2 is rescued by the refinement pass
  EXPECT_NEAR(nonlinearity(fixtures::perturbed(), 4).value, std::log(3.01 / 2.99), 1e-9);
  EXPECT_THROW(nonlinearity(fixtures::perturbed(), 1), Error);
}

TEST(DistortionOn, AffineIsZero) {
  const auto s = fixtures::three_branch();
  for (std::size_t m = 0; m <= 4; ++m)
    for (const auto& b : blocks<Rational>(s, m)) EXPECT_EQ(distortion_on(s, m, b.interval, 8).value, 0.0);
}

TEST(DistortionOn, PerturbedAgainstHandOracle) {
  const auto s = fixtures::perturbed();
  const HandTernary hand{0.01};
  const double n1 = nonlinearity(s, 1000).value;
  const auto b = block_of<double>(s, Word{1, 1, 1, 1, 1});
  const double v = distortion_on(s, 5, b.interval, 33).value;
  EXPECT_LE(v, 5 * n1);
  const double oracle = hand.distortion(b.word, b.interval.lo, b.interval.hi, 20000);
  EXPECT_GE(v, oracle - 1e-12);
  EXPECT_NEAR(v, oracle, 1e-9);
  for (const auto& blk : blocks<double>(s, 4)) {
    const double o = hand.distortion(blk.word, blk.interval.lo, blk.interval.hi, 20000);
    EXPECT_NEAR(distortion_on(s, 4, blk.interval, 33).value, o, 1e-9) << blk.word.to_string();
  }
}

TEST(DistortionOn, RejectsIntervalsAcrossGaps) {
  const auto s = fixtures::perturbed();
  try {
    distortion_on(s, 5, Interval<double>(0.3, 0.7), 33);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::precondition);
  }
}

TEST(DistortionOn, SubadditiveAndMonotoneUnderRefinement) {
  const auto s = make_perturbed_system(fixtures::ternary_flip(), {0.05, -0.08});
  const double n1 = nonlinearity(s, 2000).value;
  for (std::size_t m = 1; m <= 7; ++m) {
    for (const auto& b : blocks<double>(s, m)) {
      const double v = distortion_on(s, m, b.interval, 17).value;
      EXPECT_LE(v, m * n1 + 1e-9);
      const Interval<double> left(b.interval.lo, b.interval.midpoint());
      EXPECT_LE(distortion_on(s, m, left, 17).value, v + 1e-12);
    }
  }
}

TEST(ChainBound, AffineFactorsGiveZero) {
  const auto s = fixtures::ternary();
  const auto blk = to_double(block_of<Rational>(s, Word{1, 2}).interval);
  const auto r = chain_bound_check(s, 2, AffineMap<double>{1.0, 0.0}, blk, 33);
  EXPECT_EQ(r.lhs, 0.0);
  EXPECT_EQ(r.rhs, 0.0);
  EXPECT_TRUE(r.holds);
}

TEST(ChainBound, IdentityInnerFactorIsTheIterate) {
  const auto s = fixtures::perturbed();
  const auto blk = block_of<double>(s, Word{1, 1, 2}).interval;
  const auto r = chain_bound_check(s, 3, AffineMap<double>{1.0, 0.0}, blk, 33);
  EXPECT_NEAR(r.lhs, r.rhs, 1e-15);
  EXPECT_EQ(r.inner, 0.0);
  EXPECT_TRUE(r.holds);
}

TEST(ChainBound, ContractionAndIterateInnerFactorsHold) {
  const auto s = fixtures::perturbed(0.2, 0.0);
  const auto target = block_of<double>(s, Word{1, 1}).interval;
  const Interval<double> domain(0.0, 1.0);
  const auto h = AffineMap<double>::matching(domain, target, 1);
  const auto r = chain_bound_check(s, 2, h, domain, 65);
  EXPECT_TRUE(r.holds);
  EXPECT_GT(r.lhs, 0.0);
  const auto blk = block_of<double>(s, Word{1, 1, 1, 2, 1}).interval;
  const auto it = chain_bound_check(s, 3, SystemIterate{2}, blk, 65);
  EXPECT_TRUE(it.holds);
  EXPECT_LE(it.lhs, it.outer + it.inner + 1e-9);
  EXPECT_THROW(chain_bound_check(s, 2, AffineMap<double>{1.0, 0.0}, Interval<double>(0.2, 0.8), 33), Error);
}

TEST(BoundedDistortion, TrivialCases) {
  EXPECT_EQ(bounded_distortion_depth(fixtures::ternary(), 0.1, 10).N, 1u);
  EXPECT_EQ(bounded_distortion_depth(fixtures::perturbed(), 10.0, 8).N, 1u);
  EXPECT_THROW(bounded_distortion_depth(fixtures::perturbed(), 0.0, 8), Error);
}

TEST(BoundedDistortion, FiniteDepthCertifiedByRescan) {
  const auto s = fixtures::perturbed();
  const auto bd = bounded_distortion_depth(s, 0.001, 12);
  ASSERT_TRUE(bd.certified());
  EXPECT_GE(bd.N, 2u);
  const HandTernary hand{0.01};
  for (std::size_t m = bd.N + 1; m <= 12; ++m)
    for (const auto& b : blocks<double>(s, m)) {
      const std::size_t it = m - bd.N + 1;
      EXPECT_LT(distortion_on(s, it, b.interval, 33).value, 0.001);
      if (m <= 8) {
        EXPECT_LT(hand.distortion(b.word.prefix(it), b.interval.lo, b.interval.hi, 64), 0.001);
      }
    }
  // N - 1 does not certify
  bool fails_below = false;
  for (std::size_t m = bd.N; m <= 12 && !fails_below; ++m)
    for (const auto& b : blocks<double>(s, m))
      if (!(distortion_on(s, m - bd.N + 2, b.interval, 33).value < 0.001)) {
        fails_below = true;
        break;
      }
  EXPECT_TRUE(fails_below);
}

TEST(BoundedDistortion, SentinelWhenNothingCertifies) {
  const auto bd = bounded_distortion_depth(fixtures::perturbed(0.5, 0.5), 1e-12, 5);
  EXPECT_FALSE(bd.certified());
  EXPECT_EQ(bd.N, 6u);
}

TEST(GapLevelBound, TernaryAndTwoScale) {
  const auto t = gap_level_bound(fixtures::ternary(), 1.0);
  EXPECT_EQ(t.mu, (std::vector<double>{3.0, 3.0}));
  EXPECT_DOUBLE_EQ(t.beta, 2.0);
  EXPECT_EQ(t.l, 1u);
  EXPECT_EQ(t.l, static_cast<std::size_t>(std::floor(1.0 / std::log(2.0))));
  const auto f = gap_level_bound(fixtures::two_scale(), 0.5);
  EXPECT_EQ(f.mu, (std::vector<double>{2.0, 4.0}));
  EXPECT_DOUBLE_EQ(f.beta, 1.5);
  EXPECT_EQ(f.l, 2u);
  EXPECT_EQ(f.l, static_cast<std::size_t>(std::floor(1.0 / std::log(1.5))));
}

TEST(GapLevelBound, ClosedFormOnAsymmetricGaps) {
  // gaps 1/5 and 1/10: l = floor(log(e * 2) / log beta)
  const auto r = make_affine_system({q(0), q(1)}, {{q(0), q(1, 5)}, {q(2, 5), q(3, 5)}, {q(7, 10), q(1)}}, {1, 1, 1});
  const auto lb = gap_level_bound(r);
  EXPECT_DOUBLE_EQ(lb.delta, (10.0 / 3.0 - 1.0) / 2.0);
  EXPECT_EQ(lb.l, static_cast<std::size_t>(std::floor((1.0 + std::log(2.0)) / std::log(lb.beta))));
}

TEST(GapLevelBound, RejectsLargeDelta) {
  EXPECT_THROW(gap_level_bound(fixtures::ternary(), 2.0), Error);
  EXPECT_THROW(gap_level_bound(fixtures::perturbed(), 1.0), Error);
}

TEST(CompareGaps, Examples) {
  const auto r = fixtures::ternary();
  EXPECT_EQ(compare_gaps(r, r, 6).c, 0.0);
  const auto s = fixtures::perturbed();
  EXPECT_EQ(compare_gaps(s, r, 0).c, 0.0);
  const auto c4 = compare_gaps(s, r, 4);
  EXPECT_GT(c4.c, 0.0);
  EXPECT_LE(c4.c, 4 * nonlinearity(s, 1000).value);
  EXPECT_NEAR(c4.band_lo, std::exp(-2 * c4.c), 1e-15);
  // exhaustive oracle: forward-verified S-gaps against closed-form ternary gaps
  const HandTernary hand{0.01};
  double c = 0.0;
  for (std::size_t m = 0; m <= 4; ++m)
    for (const auto& g : gaps<double>(s, m)) {
      double lo = g.interval.lo, hi = g.interval.hi;
      for (int sym : g.word) {
        lo = hand.S(sym, lo);
        hi = hand.S(sym, hi);
      }
      EXPECT_NEAR(lo, 1.0 / 3.0, 1e-9);
      EXPECT_NEAR(hi, 2.0 / 3.0, 1e-9);
      c = std::max(c, std::abs(std::log(g.interval.length() * std::pow(3.0, m + 1))));
    }
  EXPECT_NEAR(c4.c, c, 1e-12);
  double prev = 0.0;
  for (std::size_t l = 0; l <= 7; ++l) {
    const double cl = compare_gaps(s, r, l).c;
    EXPECT_GE(cl, prev);
    prev = cl;
  }
  EXPECT_THROW(compare_gaps(s, fixtures::two_scale(), 2), Error);
  EXPECT_THROW(compare_gaps(r, s, 2), Error);
}
