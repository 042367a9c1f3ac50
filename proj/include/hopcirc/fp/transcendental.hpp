#pragma once

#include "hopcirc/fp/rounding.hpp"

namespace hopcirc {

namespace detail {

// ln 2 * 2^bits, truncated; uses ln 2 = 2 atanh(1/3). Error below 2^6 units.
inline BigInt ln2_fixed(std::int64_t bits) {
  const BigInt one = BigInt(1) << static_cast<unsigned>(bits);
  BigInt power = one / 3;
  BigInt sum = 0;
  for (std::int64_t k = 1; power != 0; k += 2) {
    sum += power / k;
    power /= 9;
  }
  return sum * 2;
}

// floor(sqrt(n)) by integer Newton iteration.
inline BigInt isqrt(const BigInt& n) {
  if (n < 2) return n;
  BigInt x = BigInt(1) << static_cast<unsigned>((bit_length(n) + 1) / 2);
  while (true) {
    BigInt y = (x + n / x) >> 1;
    if (y >= x) return x;
    x = std::move(y);
  }
}

}  // namespace detail

/// e^x with relative error at most 2^-p.
///
/// Argument reduction x = k ln2 + r, |r| <= ln2 / 2, then a Taylor series for
/// e^r in fixed point with 5p + 64 fractional bits and a single final round.
inline FpNum fp_exp(const FpNum& x, FpFlags* flags = nullptr) {
  const int p = x.p;
  check_precision(p);
  if (x.is_zero()) return FpNum::one(p);

  const std::int64_t abs_m = x.m < 0 ? -x.m : x.m;
  const std::int64_t magnitude_bits = detail::bit_length(BigInt(abs_m)) + x.e;
  if (magnitude_bits > p + 2) {
    // |x| >= 2^(p+2) exceeds ln(max_finite) ~ 0.7 * 2^p.
    if (x.m > 0) {
      if (flags) flags->overflow = true;
      return max_finite(p);
    }
    if (flags) flags->underflow = true;
    return FpNum::zero(p);
  }
  // |x| < 2^-(p+3): e^x is within a quarter ulp of one.
  if (magnitude_bits < -(p + 3)) return FpNum::one(p);

  const std::int64_t frac_bits = 5 * static_cast<std::int64_t>(p) + 64;
  const std::int64_t shift = x.e + frac_bits;
  BigInt fixed = shift >= 0 ? BigInt(BigInt(abs_m) << static_cast<unsigned>(shift))
                            : BigInt(BigInt(abs_m) >> static_cast<unsigned>(-shift));
  if (x.m < 0) fixed = -fixed;

  const BigInt ln2 = detail::ln2_fixed(frac_bits + 8) >> 8;
  // k = nearest integer to fixed / ln2
  BigInt k = (2 * fixed + ln2) / (2 * ln2);
  if (2 * fixed + ln2 < 0 && k * (2 * ln2) != 2 * fixed + ln2) --k;  // floor for negatives
  const BigInt r = fixed - k * ln2;

  const BigInt one = BigInt(1) << static_cast<unsigned>(frac_bits);
  BigInt sum = one;
  BigInt term = one;
  for (int n = 1;; ++n) {
    term = (term * r) / (one * n);
    if (term == 0) break;
    sum += term;
  }
  const auto k64 = static_cast<std::int64_t>(k);
  return round_scaled(false, sum, k64 - frac_bits, true, p, flags);
}

/// sqrt(x) for x >= 0, correctly rounded; throws std::domain_error for x < 0.
inline FpNum fp_sqrt(const FpNum& x, FpFlags* flags = nullptr) {
  check_precision(x.p);
  if (x.m < 0) throw std::domain_error("fp_sqrt: negative input");
  if (x.is_zero()) return x;
  BigInt m(x.m);
  std::int64_t e = x.e;
  if (e % 2 != 0) {
    m <<= 1;
    e -= 1;
  }
  const std::int64_t guard = x.p + 2;
  const BigInt scaled = m << static_cast<unsigned>(2 * guard);
  const BigInt root = detail::isqrt(scaled);
  return round_scaled(false, root, e / 2 - guard, root * root != scaled, x.p, flags);
}

}  // namespace hopcirc
