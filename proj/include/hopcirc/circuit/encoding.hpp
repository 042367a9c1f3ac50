#pragma once

#include "hopcirc/fp/num.hpp"

#include <span>
#include <vector>

namespace hopcirc {

/// Bit layout of one FpNum on circuit wires, least significant bit first:
/// bits [0, p+1) significand, bits [p+1, 2p+2) exponent, both (p+1)-bit two's
/// complement.
struct FpBitEncoding {
  int p;

  std::size_t width() const { return 2 * static_cast<std::size_t>(p) + 2; }
  std::size_t field() const { return static_cast<std::size_t>(p) + 1; }

  void encode_into(const FpNum& x, std::vector<std::uint8_t>& out) const {
    if (x.p != p) throw std::invalid_argument("encode: precision mismatch");
    const auto put = [&](std::int64_t v) {
      const auto u = static_cast<std::uint64_t>(v);
      for (std::size_t i = 0; i < field(); ++i) out.push_back(static_cast<std::uint8_t>((u >> i) & 1));
    };
    put(x.m);
    put(x.e);
  }

  std::vector<std::uint8_t> encode(const FpNum& x) const {
    std::vector<std::uint8_t> out;
    out.reserve(width());
    encode_into(x, out);
    return out;
  }

  /// Throws std::invalid_argument for a wrong width or a non-normalized value.
  FpNum decode(std::span<const std::uint8_t> bits) const {
    if (bits.size() != width()) {
      throw std::invalid_argument("decode: expected " + std::to_string(width()) + " bits, got " +
                                  std::to_string(bits.size()));
    }
    const auto get = [&](std::size_t offset) {
      std::int64_t v = 0;
      for (std::size_t i = 0; i < field(); ++i) v |= static_cast<std::int64_t>(bits[offset + i] & 1) << i;
      if (bits[offset + field() - 1] & 1) v -= std::int64_t{1} << field();
      return v;
    };
    return make_fp(get(0), get(field()), p);
  }
};

inline std::vector<std::uint8_t> encode_all(std::span<const FpNum> xs, int p) {
  const FpBitEncoding enc{p};
  std::vector<std::uint8_t> out;
  out.reserve(xs.size() * enc.width());
  for (const FpNum& x : xs) enc.encode_into(x, out);
  return out;
}

inline std::vector<FpNum> decode_all(std::span<const std::uint8_t> bits, int p) {
  const FpBitEncoding enc{p};
  if (bits.size() % enc.width() != 0) throw std::invalid_argument("decode_all: ragged bit vector");
  std::vector<FpNum> out;
  for (std::size_t k = 0; k < bits.size(); k += enc.width()) out.push_back(enc.decode(bits.subspan(k, enc.width())));
  return out;
}

}  // namespace hopcirc
