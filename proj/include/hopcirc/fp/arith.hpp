#pragma once

#include "hopcirc/fp/rounding.hpp"

#include <compare>
#include <span>

namespace hopcirc {

namespace detail {

inline void require_same_precision(const FpNum& x, const FpNum& y, const char* op) {
  if (x.p != y.p) {
    throw std::invalid_argument(std::string(op) + ": precision mismatch (" +
                                std::to_string(x.p) + " vs " + std::to_string(y.p) + ")");
  }
}

inline void require_precision(std::span<const FpNum> xs, int p, const char* op) {
  check_precision(p);
  for (const FpNum& x : xs) {
    if (x.p != p) throw std::invalid_argument(std::string(op) + ": precision mismatch");
  }
}

}  // namespace detail

/// round_p(x + y).
inline FpNum fp_add(const FpNum& x, const FpNum& y, FpFlags* flags = nullptr) {
  detail::require_same_precision(x, y, "fp_add");
  if (x.is_zero()) return y;
  if (y.is_zero()) return x;
  const int p = x.p;
  const FpNum& big = x.e >= y.e ? x : y;
  const FpNum& small = x.e >= y.e ? y : x;
  const std::int64_t diff = big.e - small.e;
  const std::int64_t guard = p + 3;
  if (diff <= guard) {
    const BigInt sum = (BigInt(big.m) << static_cast<unsigned>(diff)) + small.m;
    return round_integer(sum, small.e, p, flags);
  }

  // The small operand only reaches below the guard window: split it into
  // floor(small * 2^(guard - diff)) plus a fraction in [0, 1).
  const std::int64_t shift = diff - guard;
  const BigInt small_mag(small.m < 0 ? -small.m : small.m);
  BigInt whole = shift >= 64 ? BigInt(0) : BigInt(small_mag >> static_cast<unsigned>(shift));
  const bool inexact = shift >= 64 || (whole << static_cast<unsigned>(shift)) != small_mag;
  if (small.m < 0) whole = -(whole + (inexact ? 1 : 0));

  const BigInt sum = (BigInt(big.m) << static_cast<unsigned>(guard)) + whole;
  // sum + frac with frac in [0, 1); for negative sums the magnitude is
  // (-sum - 1) + (1 - frac).
  if (sum >= 0) return round_scaled(false, sum, big.e - guard, inexact, p, flags);
  const BigInt mag = inexact ? BigInt(-sum - 1) : BigInt(-sum);
  return round_scaled(true, mag, big.e - guard, inexact, p, flags);
}

inline FpNum fp_sub(const FpNum& x, const FpNum& y, FpFlags* flags = nullptr) {
  return fp_add(x, fp_neg(y), flags);
}

/// round_p(x * y).
inline FpNum fp_mul(const FpNum& x, const FpNum& y, FpFlags* flags = nullptr) {
  detail::require_same_precision(x, y, "fp_mul");
  if (x.is_zero() || y.is_zero()) return FpNum::zero(x.p);
  return round_integer(BigInt(x.m) * y.m, x.e + y.e, x.p, flags);
}

/// round_p(x / y); throws std::domain_error when y is zero.
inline FpNum fp_div(const FpNum& x, const FpNum& y, FpFlags* flags = nullptr) {
  detail::require_same_precision(x, y, "fp_div");
  if (y.is_zero()) throw std::domain_error("fp_div: division by zero");
  if (x.is_zero()) return FpNum::zero(x.p);
  const int p = x.p;
  const std::int64_t scale = p + 3;
  const BigInt num = BigInt(x.m < 0 ? -x.m : x.m) << static_cast<unsigned>(scale);
  const BigInt den(y.m < 0 ? -y.m : y.m);
  BigInt q, r;
  boost::multiprecision::divide_qr(num, den, q, r);
  return round_scaled((x.m < 0) != (y.m < 0), q, x.e - y.e - scale, r != 0, p, flags);
}

/// Ordering of the exact values.
inline std::strong_ordering fp_cmp(const FpNum& x, const FpNum& y) {
  detail::require_same_precision(x, y, "fp_cmp");
  const int sx = (x.m > 0) - (x.m < 0);
  const int sy = (y.m > 0) - (y.m < 0);
  if (sx != sy || sx == 0) return sx <=> sy;
  const std::int64_t ax = sx < 0 ? -x.m : x.m;
  const std::int64_t ay = sy < 0 ? -y.m : y.m;
  // Normalized significands put every nonzero exponent in its own binade.
  const std::strong_ordering mag = x.e != y.e ? x.e <=> y.e : ax <=> ay;
  return sx > 0 ? mag : 0 <=> mag;
}

inline FpNum fp_max(const FpNum& x, const FpNum& y) { return fp_cmp(x, y) < 0 ? y : x; }

/// Exact sum of all terms, rounded once. An empty list sums to zero.
inline FpNum iter_add(std::span<const FpNum> xs, int p, FpFlags* flags = nullptr) {
  detail::require_precision(xs, p, "iter_add");
  std::int64_t base = 0;
  bool any = false;
  for (const FpNum& x : xs) {
    if (x.is_zero()) continue;
    base = any ? std::min(base, x.e) : x.e;
    any = true;
  }
  if (!any) return FpNum::zero(p);
  BigInt acc = 0;
  for (const FpNum& x : xs) {
    if (!x.is_zero()) acc += BigInt(x.m) << static_cast<unsigned>(x.e - base);
  }
  return round_integer(acc, base, p, flags);
}

/// Exact product of all factors, rounded once. An empty list multiplies to one.
inline FpNum iter_mul(std::span<const FpNum> xs, int p, FpFlags* flags = nullptr) {
  detail::require_precision(xs, p, "iter_mul");
  BigInt acc = 1;
  std::int64_t exp = 0;
  for (const FpNum& x : xs) {
    if (x.is_zero()) return FpNum::zero(p);
    acc *= x.m;
    exp += x.e;
  }
  if (xs.empty()) return FpNum::one(p);
  return round_integer(acc, exp, p, flags);
}

}  // namespace hopcirc
