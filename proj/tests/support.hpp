#pragma once

#include "hopcirc/fp.hpp"

#include "hopcirc/linalg/matrix.hpp"

#include <ostream>
#include <random>

namespace hopcirc {

inline void PrintTo(const FpNum& x, std::ostream* os) { *os << to_string(x); }
inline void PrintTo(const FpMatrix& a, std::ostream* os) { *os << "\n" << to_fixture(a); }

}  // namespace hopcirc

namespace testing_support {

using hopcirc::FpNum;

// Uniform significand, exponent uniform in [e_lo, e_hi], random sign.
inline FpNum random_fp(std::mt19937_64& rng, int p, std::int64_t e_lo, std::int64_t e_hi,
                       bool allow_negative = true) {
  std::uniform_int_distribution<std::int64_t> mdist(hopcirc::significand_min(p),
                                                    hopcirc::significand_max(p));
  std::uniform_int_distribution<std::int64_t> edist(std::max(e_lo, hopcirc::exponent_min(p)),
                                                    std::min(e_hi, hopcirc::exponent_max(p)));
  std::int64_t m = mdist(rng);
  if (allow_negative && (rng() & 1)) m = -m;
  return {m, edist(rng), p};
}

// Values of magnitude roughly 2^lo .. 2^hi (exponent relative to the
// significand width).
inline FpNum random_scaled(std::mt19937_64& rng, int p, int lo, int hi,
                           bool allow_negative = true) {
  return random_fp(rng, p, lo - (p - 1), hi - (p - 1), allow_negative);
}

inline FpNum from(double v, int p) { return hopcirc::from_double(v, p); }

}  // namespace testing_support
