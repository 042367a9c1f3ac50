#include "hopcirc/fp.hpp"
#include "oracles/fp_oracle.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <random>
#include <vector>

using namespace hopcirc;
using testing_support::from;

namespace {

FpNum fp(std::int64_t m, std::int64_t e, int p = 3) { return make_fp(m, e, p); }

}  // namespace

TEST(Round, Examples) {
  EXPECT_EQ(round_p(Rational(1), 3), fp(4, -2));
  EXPECT_EQ(round_p(Rational(3, 10), 3), fp(5, -4));
  EXPECT_EQ(round_p(Rational(9, 32), 3), fp(4, -4));  // 0.28125 -> 0.25
  EXPECT_EQ(to_rational(round_p(Rational(9, 32), 3)), Rational(1, 4));
}

TEST(Round, IdempotentOnAllOfF3AndSamples) {
  for (const FpNum& v : oracle::all_values(3)) EXPECT_EQ(round_p(to_rational(v), 3), v);
  std::mt19937_64 rng(7);
  for (int p : {6, 10, 24, 40}) {
    for (int i = 0; i < 2000; ++i) {
      const FpNum v = testing_support::random_fp(rng, p, -(1 << 20), 1 << 20);
      ASSERT_EQ(round_p(to_rational(v), p), v) << to_string(v);
    }
  }
}

TEST(Round, MatchesBruteForceOnDyadicGrid) {
  const auto values = oracle::all_values(3);
  // Every multiple of 2^-12 in [-1100, 1100] plus a fine grid near zero.
  for (int k = -1100 * 8; k <= 1100 * 8; ++k) {
    const Rational x(k, 8);
    FpFlags flags;
    const FpNum got = round_p(x, 3, &flags);
    const auto want = oracle::nearest(x, values);
    ASSERT_EQ(got, want.value) << x;
    ASSERT_EQ(flags.overflow, want.overflow) << x;
    ASSERT_EQ(flags.underflow, want.underflow) << x;
  }
  for (int k = -4096; k <= 4096; ++k) {
    const Rational x(k, BigInt(1) << 14);
    FpFlags flags;
    const FpNum got = round_p(x, 3, &flags);
    const auto want = oracle::nearest(x, values);
    ASSERT_EQ(got, want.value) << x;
    ASSERT_EQ(flags.underflow, want.underflow) << x;
  }
}

TEST(Round, TiesGoToEvenSignificand) {
  std::mt19937_64 rng(11);
  for (int p : {3, 6, 10}) {
    for (int i = 0; i < 500; ++i) {
      FpNum v = testing_support::random_fp(rng, p, -20, 20);
      if (std::abs(v.m) == significand_max(p)) continue;
      // Midpoint between v and its successor in magnitude.
      const Rational mid = to_rational(v) + (v.m < 0 ? -1 : 1) * oracle::pow2(v.e - 1);
      const FpNum r = round_p(mid, p);
      EXPECT_EQ(r.m % 2, 0) << to_string(r);
    }
  }
}

TEST(Round, Monotone) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> dist(-200000, 200000);
  for (int i = 0; i < 5000; ++i) {
    Rational a(dist(rng), 997), b(dist(rng), 991);
    if (b < a) std::swap(a, b);
    EXPECT_LE(to_rational(round_p(a, 4)), to_rational(round_p(b, 4)));
  }
}

TEST(Round, OverflowAndUnderflowClamp) {
  FpFlags flags;
  EXPECT_EQ(round_p(Rational(BigInt(1) << 20), 3, &flags), max_finite(3));
  EXPECT_TRUE(flags.overflow);
  flags.clear();
  EXPECT_EQ(round_p(Rational(-(BigInt(1) << 20)), 3, &flags), max_finite(3, true));
  EXPECT_TRUE(flags.overflow);
  flags.clear();
  EXPECT_EQ(round_p(Rational(1, BigInt(1) << 20), 3, &flags), FpNum::zero(3));
  EXPECT_TRUE(flags.underflow);
  flags.clear();
  // Exactly half the min normal: tie between 0 and min normal goes to 0.
  EXPECT_EQ(round_p(Rational(1, BigInt(1) << 7), 3, &flags), FpNum::zero(3));
  EXPECT_TRUE(flags.underflow);
  flags.clear();
  EXPECT_EQ(round_p(Rational(3, BigInt(1) << 8), 3, &flags), min_normal(3));
  EXPECT_TRUE(flags.underflow);
}

TEST(Literal, RoundTripAndRejects) {
  EXPECT_EQ(parse_fp("fp(p=3, m=5, e=-4)"), fp(5, -4));
  EXPECT_EQ(to_string(fp(-6, 2)), "fp(p=3, m=-6, e=2)");
  EXPECT_EQ(parse_fp(to_string(fp(-6, 2))), fp(-6, 2));
  EXPECT_THROW(parse_fp("fp(p=3, m=3, e=0)"), std::invalid_argument);
  EXPECT_THROW(parse_fp("fp(p=3, m=0, e=1)"), std::invalid_argument);
  EXPECT_THROW(parse_fp("fp(p=3, m=4, e=8)"), std::invalid_argument);
  EXPECT_THROW(parse_fp("garbage"), std::invalid_argument);
  EXPECT_THROW(make_fp(4, 0, 1), std::invalid_argument);
}

TEST(Add, Examples) {
  const FpNum x = fp(5, -1);
  EXPECT_EQ(fp_add(x, FpNum::zero(3)), x);
  EXPECT_EQ(fp_add(fp(4, 0), fp(4, 0)), fp(4, 1));
  EXPECT_EQ(fp_add(fp(7, 0), fp(4, -2)), fp(4, 1));
}

TEST(Mul, Examples) {
  const FpNum x = fp(-7, 3);
  EXPECT_EQ(fp_mul(fp(4, -2), x), x);
  EXPECT_EQ(fp_mul(x, FpNum::zero(3)), FpNum::zero(3));
  EXPECT_EQ(fp_mul(fp(5, 0), fp(5, 0)), fp(6, 2));
}

TEST(Div, Examples) {
  const FpNum x = fp(6, -3);
  EXPECT_EQ(fp_div(x, fp(4, -2)), x);
  EXPECT_EQ(fp_div(fp(4, -2), fp(4, -1)), fp(4, -3));
  EXPECT_EQ(fp_div(fp(4, -2), fp(6, -1)), fp(5, -4));
  EXPECT_THROW(fp_div(x, FpNum::zero(3)), std::domain_error);
}

TEST(Cmp, Examples) {
  const FpNum x = fp(-5, 2);
  EXPECT_EQ(fp_cmp(x, x), std::strong_ordering::equal);
  EXPECT_EQ(fp_cmp(FpNum::zero(3), fp(4, -2)), std::strong_ordering::less);
  EXPECT_EQ(fp_cmp(fp(4, 1), fp(7, 0)), std::strong_ordering::greater);
}

TEST(Exhaustive, P3PairsAgainstRationalOracle) {
  const auto values = oracle::all_values(3);
  for (const FpNum& x : values) {
    for (const FpNum& y : values) {
      const Rational vx = oracle::value(x), vy = oracle::value(y);
      FpFlags fa, fm;
      const auto want_add = oracle::nearest(vx + vy, values);
      ASSERT_EQ(fp_add(x, y, &fa), want_add.value) << to_string(x) << " + " << to_string(y);
      ASSERT_EQ(fa.overflow, want_add.overflow);
      ASSERT_EQ(fa.underflow, want_add.underflow);
      const auto want_mul = oracle::nearest(vx * vy, values);
      ASSERT_EQ(fp_mul(x, y, &fm), want_mul.value) << to_string(x) << " * " << to_string(y);
      ASSERT_EQ(fm.overflow, want_mul.overflow);
      ASSERT_EQ(fm.underflow, want_mul.underflow);
      if (!y.is_zero()) {
        ASSERT_EQ(fp_div(x, y), oracle::nearest(vx / vy, values).value);
      }
      ASSERT_EQ(fp_cmp(x, y), vx < vy   ? std::strong_ordering::less
                             : vx > vy ? std::strong_ordering::greater
                                       : std::strong_ordering::equal);
    }
  }
}

TEST(Add, WideExponentGapsAgainstRational) {
  std::mt19937_64 rng(3);
  for (int p : {4, 8, 24}) {
    for (int i = 0; i < 20000; ++i) {
      const FpNum x = testing_support::random_fp(rng, p, -3 * p, 3 * p);
      const FpNum y = testing_support::random_fp(rng, p, -3 * p, 3 * p);
      ASSERT_EQ(fp_add(x, y), round_p(to_rational(x) + to_rational(y), p))
          << to_string(x) << " + " << to_string(y);
    }
  }
}

TEST(IterAdd, Examples) {
  EXPECT_EQ(iter_add({}, 3), FpNum::zero(3));
  const FpNum x = fp(-5, 1);
  EXPECT_EQ(iter_add(std::vector{x}, 3), x);
  EXPECT_EQ(iter_add(std::vector<FpNum>(9, FpNum::one(3)), 3), fp(4, 1));
}

TEST(IterAdd, SingleRoundingWitnessAtP3) {
  // Search all triples of small F_3 values for one where a left fold of
  // fp_add differs from the single-rounded sum.
  std::vector<FpNum> small;
  for (const FpNum& v : oracle::all_values(3)) {
    if (v.e >= -3 && v.e <= 1) small.push_back(v);
  }
  bool found = false;
  for (const FpNum& a : small) {
    for (const FpNum& b : small) {
      for (const FpNum& c : small) {
        const FpNum folded = fp_add(fp_add(a, b), c);
        const FpNum once = iter_add(std::vector{a, b, c}, 3);
        if (folded != once) {
          EXPECT_EQ(once, oracle::nearest(oracle::value(a) + oracle::value(b) + oracle::value(c),
                                          oracle::all_values(3))
                              .value);
          found = true;
          break;
        }
      }
      if (found) break;
    }
    if (found) break;
  }
  EXPECT_TRUE(found);
}

TEST(IterMul, Examples) {
  const FpNum one = FpNum::one(3), two = fp(4, -1);
  EXPECT_EQ(iter_mul(std::vector{two, FpNum::zero(3), two}, 3), FpNum::zero(3));
  EXPECT_EQ(iter_mul(std::vector{one, one, one}, 3), one);
  EXPECT_EQ(iter_mul(std::vector{two, two, two}, 3), fp(4, 1));
  EXPECT_EQ(iter_mul({}, 3), one);
}

TEST(IterAddMul, AgreeWithRationalOracle) {
  std::mt19937_64 rng(19);
  for (int p : {3, 6, 12}) {
    for (int i = 0; i < 2000; ++i) {
      std::vector<FpNum> xs;
      const int n = 1 + static_cast<int>(rng() % 6);
      for (int k = 0; k < n; ++k) xs.push_back(testing_support::random_fp(rng, p, -2 * p, 2 * p));
      Rational sum = 0, prod = 1;
      for (const FpNum& x : xs) {
        sum += to_rational(x);
        prod *= to_rational(x);
      }
      ASSERT_EQ(iter_add(xs, p), round_p(sum, p));
      ASSERT_EQ(iter_mul(xs, p), round_p(prod, p));
    }
  }
}

TEST(Exp, Examples) {
  EXPECT_EQ(fp_exp(FpNum::zero(3)), fp(4, -2));
  EXPECT_EQ(fp_exp(FpNum::one(3)), fp(5, -1));
  EXPECT_EQ(fp_exp(fp_neg(FpNum::one(3))), fp(6, -4));
}

TEST(Exp, RangeLimitsFlag) {
  FpFlags flags;
  EXPECT_EQ(fp_exp(fp(4, 4), &flags), max_finite(3));
  EXPECT_TRUE(flags.overflow);
  flags.clear();
  EXPECT_EQ(fp_exp(fp(-4, 4), &flags), FpNum::zero(3));
  EXPECT_TRUE(flags.underflow);
  flags.clear();
  EXPECT_EQ(fp_exp(fp(4, -8)), FpNum::one(3));
  EXPECT_EQ(fp_exp(make_fp(1 << 9, -30, 10)), FpNum::one(10));
}

TEST(Sqrt, Examples) {
  EXPECT_EQ(fp_sqrt(FpNum::one(3)), FpNum::one(3));
  EXPECT_EQ(fp_sqrt(fp(4, 0)), fp(4, -1));
  EXPECT_EQ(fp_sqrt(fp(4, -1)), fp(6, -2));
  EXPECT_THROW(fp_sqrt(fp(-4, 0)), std::domain_error);
  EXPECT_EQ(fp_sqrt(FpNum::zero(3)), FpNum::zero(3));
}

TEST(Sqrt, CorrectlyRoundedOnAllOfF3) {
  const auto values = oracle::all_values(3);
  for (const FpNum& x : values) {
    if (x.m <= 0) continue;
    // sqrt is correctly rounded, so it must equal the brute-force nearest.
    // Compare squares against candidate neighbours exactly.
    const FpNum r = fp_sqrt(x);
    const Rational v = oracle::value(x);
    auto it = std::find(values.begin(), values.end(), r);
    ASSERT_NE(it, values.end());
    // Each neighbour midpoint squared brackets v.
    if (std::next(it) != values.end()) {
      const Rational hi = (oracle::value(r) + oracle::value(*std::next(it))) / 2;
      EXPECT_LE(v, hi * hi) << to_string(x);
    }
    if (it != values.begin()) {
      const Rational lo = (oracle::value(r) + oracle::value(*std::prev(it))) / 2;
      EXPECT_GE(v, lo * lo) << to_string(x);
    }
  }
}

TEST(ExpSqrt, RelativeErrorAgainstMpfr) {
  std::mt19937_64 rng(23);
  for (int p : {3, 6, 10, 24}) {
    const double bound = std::ldexp(1.0, -p);
    int checked = 0;
    while (checked < 2000) {
      const FpNum x = testing_support::random_scaled(rng, p, -p - 4, std::min(p - 1, 8));
      FpFlags flags;
      const FpNum y = fp_exp(x, &flags);
      if (flags.any()) continue;
      ASSERT_LE(oracle::exp_relative_error(x, y), bound) << to_string(x);
      const FpNum ax = fp_abs(x);
      ASSERT_LE(oracle::sqrt_relative_error(ax, fp_sqrt(ax)), bound) << to_string(ax);
      ++checked;
    }
  }
}
