#pragma once

#include "hopcirc/fp/num.hpp"

#include <cmath>

namespace hopcirc {

namespace detail {

inline std::int64_t bit_length(const BigInt& v) {
  return v == 0 ? 0 : static_cast<std::int64_t>(boost::multiprecision::msb(v)) + 1;
}

inline bool is_power_of_two(const BigInt& v) { return v != 0 && (v & (v - 1)) == 0; }

}  // namespace detail

/// Rounds (-1)^negative * (mag + d) * 2^exp to the nearest p-bit float, ties
/// to even significand.
///
/// `sticky` states that the true magnitude lies strictly inside
/// (mag, mag + 1) * 2^exp; it is meaningful only when mag carries at least
/// p + 1 significant bits, which every caller guarantees.
///
/// Out-of-range results are clamped to the nearest representable value
/// (max finite, min normal or zero) and flagged.
inline FpNum round_scaled(bool negative, BigInt mag, std::int64_t exp, bool sticky, int p,
                          FpFlags* flags = nullptr) {
  if (mag == 0) {
    if (sticky) throw std::logic_error("round_scaled: sticky bit without significant bits");
    return FpNum::zero(p);
  }
  std::int64_t len = detail::bit_length(mag);
  if (len < p + 2) {
    const std::int64_t pad = p + 2 - len;
    mag <<= static_cast<unsigned>(pad);
    exp -= pad;
    len += pad;
  }
  if (sticky) {
    mag = (mag << 1) | 1;
    exp -= 1;
    len += 1;
  }

  const std::int64_t shift = len - p;
  BigInt q = mag >> static_cast<unsigned>(shift);
  const BigInt rem = mag - (q << static_cast<unsigned>(shift));
  const BigInt half = BigInt(1) << static_cast<unsigned>(shift - 1);
  if (rem > half || (rem == half && (q & 1) != 0)) ++q;
  std::int64_t e = exp + shift;
  if (q == (BigInt(1) << p)) {
    q >>= 1;
    ++e;
  }

  if (e > exponent_max(p)) {
    if (flags) flags->overflow = true;
    return max_finite(p, negative);
  }
  if (e < exponent_min(p)) {
    if (flags) flags->underflow = true;
    // Only 0 and the min normal are candidates; a tie goes to 0.
    const std::int64_t lead = exp + len - 1;
    const std::int64_t half_min_exp = p - 2 + exponent_min(p);
    const bool above_half =
        lead > half_min_exp || (lead == half_min_exp && !detail::is_power_of_two(mag));
    return above_half ? min_normal(p, negative) : FpNum::zero(p);
  }
  const auto sig = static_cast<std::int64_t>(q);
  return {negative ? -sig : sig, e, p};
}

/// round_p of an exact signed integer times 2^exp.
inline FpNum round_integer(const BigInt& value, std::int64_t exp, int p,
                           FpFlags* flags = nullptr) {
  return round_scaled(value < 0, value < 0 ? BigInt(-value) : value, exp, false, p, flags);
}

/// round_p of an exact rational.
inline FpNum round_p(const Rational& x, int p, FpFlags* flags = nullptr) {
  check_precision(p);
  BigInt num = boost::multiprecision::numerator(x);
  const BigInt den = boost::multiprecision::denominator(x);
  if (num == 0) return FpNum::zero(p);
  const bool negative = num < 0;
  if (negative) num = -num;

  // Scale so that the integer quotient carries at least p + 2 bits.
  const std::int64_t k = (p + 3) - (detail::bit_length(num) - detail::bit_length(den));
  BigInt q, r;
  if (k >= 0) {
    boost::multiprecision::divide_qr(BigInt(num << static_cast<unsigned>(k)), den, q, r);
  } else {
    boost::multiprecision::divide_qr(num, BigInt(den << static_cast<unsigned>(-k)), q, r);
  }
  return round_scaled(negative, q, -k, r != 0, p, flags);
}

/// round_p of the exact value of a finite double.
inline FpNum from_double(double v, int p, FpFlags* flags = nullptr) {
  if (!std::isfinite(v)) throw std::invalid_argument("from_double: non-finite input");
  check_precision(p);
  if (v == 0.0) return FpNum::zero(p);
  int exp = 0;
  const double frac = std::frexp(v, &exp);
  const auto mant = static_cast<std::int64_t>(std::ldexp(frac, 53));
  return round_integer(BigInt(mant), static_cast<std::int64_t>(exp) - 53, p, flags);
}

}  // namespace hopcirc
