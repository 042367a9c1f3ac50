#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <regex>
#include <stdexcept>
#include <string>

namespace hopcirc {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline constexpr int min_precision = 2;
inline constexpr int max_precision = 40;

// Range notices raised by rounding. Sticky: callers accumulate them with |=
// across a sequence of operations and clear them explicitly.
struct FpFlags {
  bool overflow = false;
  bool underflow = false;

  bool any() const { return overflow || underflow; }
  void clear() { *this = {}; }

  FpFlags& operator|=(const FpFlags& other) {
    overflow = overflow || other.overflow;
    underflow = underflow || other.underflow;
    return *this;
  }
  friend bool operator==(const FpFlags&, const FpFlags&) = default;
};

inline void check_precision(int p) {
  if (p < min_precision || p > max_precision) {
    throw std::invalid_argument("precision " + std::to_string(p) + " outside [" +
                                std::to_string(min_precision) + ", " +
                                std::to_string(max_precision) + "]");
  }
}

inline std::int64_t exponent_min(int p) { return -(std::int64_t{1} << p); }
inline std::int64_t exponent_max(int p) { return (std::int64_t{1} << p) - 1; }
inline std::int64_t significand_min(int p) { return std::int64_t{1} << (p - 1); }
inline std::int64_t significand_max(int p) { return (std::int64_t{1} << p) - 1; }

/// A p-bit floating-point number <m, e> with value m * 2^e.
///
/// Normalized: |m| in [2^(p-1), 2^p) or m == 0, and e in [-2^p, 2^p). Zero is
/// canonical (m == 0 implies e == 0), so equality of values is equality of
/// representations.
struct FpNum {
  std::int64_t m = 0;
  std::int64_t e = 0;
  int p = 0;

  static FpNum zero(int p) { return {0, 0, p}; }
  static FpNum one(int p) { return {significand_min(p), -(p - 1), p}; }

  bool is_zero() const { return m == 0; }
  bool is_negative() const { return m < 0; }

  friend bool operator==(const FpNum&, const FpNum&) = default;
};

inline bool is_valid(const FpNum& x) {
  if (x.p < min_precision || x.p > max_precision) return false;
  if (x.m == 0) return x.e == 0;
  const std::int64_t mag = x.m < 0 ? -x.m : x.m;
  return mag >= significand_min(x.p) && mag <= significand_max(x.p) &&
         x.e >= exponent_min(x.p) && x.e <= exponent_max(x.p);
}

/// Checked constructor; throws std::invalid_argument for non-normalized input.
inline FpNum make_fp(std::int64_t m, std::int64_t e, int p) {
  check_precision(p);
  FpNum x{m, e, p};
  if (!is_valid(x)) {
    throw std::invalid_argument("not a normalized " + std::to_string(p) +
                                "-bit float: m=" + std::to_string(m) +
                                " e=" + std::to_string(e));
  }
  return x;
}

inline FpNum fp_neg(const FpNum& x) { return {-x.m, x.e, x.p}; }

inline FpNum fp_abs(const FpNum& x) { return {x.m < 0 ? -x.m : x.m, x.e, x.p}; }

inline FpNum max_finite(int p, bool negative = false) {
  return {negative ? -significand_max(p) : significand_max(p), exponent_max(p), p};
}

inline FpNum min_normal(int p, bool negative = false) {
  return {negative ? -significand_min(p) : significand_min(p), exponent_min(p), p};
}

inline Rational to_rational(const FpNum& x) {
  if (x.m == 0) return Rational(0);
  BigInt m(x.m);
  if (x.e >= 0) return Rational(m << static_cast<unsigned>(x.e));
  return Rational(m, BigInt(1) << static_cast<unsigned>(-x.e));
}

/// Nearest double; saturates to +-inf or 0 outside the double range.
inline double to_double(const FpNum& x) {
  if (x.e > 4096) return x.m < 0 ? -HUGE_VAL : HUGE_VAL;
  if (x.e < -4096) return 0.0;
  return std::ldexp(static_cast<double>(x.m), static_cast<int>(x.e));
}

// Literal format: fp(p=3, m=5, e=-4)

inline std::string to_string(const FpNum& x) {
  return "fp(p=" + std::to_string(x.p) + ", m=" + std::to_string(x.m) +
         ", e=" + std::to_string(x.e) + ")";
}

inline FpNum parse_fp(const std::string& text) {
  static const std::regex pattern(
      R"(\s*fp\(\s*p\s*=\s*(-?\d+)\s*,\s*m\s*=\s*(-?\d+)\s*,\s*e\s*=\s*(-?\d+)\s*\)\s*)");
  std::smatch match;
  if (!std::regex_match(text, match, pattern)) {
    throw std::invalid_argument("malformed fp literal: '" + text + "'");
  }
  return make_fp(std::stoll(match[2].str()), std::stoll(match[3].str()),
                 std::stoi(match[1].str()));
}

}  // namespace hopcirc
