#pragma once

#include "hopcirc/circuit/builder.hpp"

#include <bit>

namespace hopcirc::gadget {

/// Little-endian bit vector of wires.
using Bits = std::vector<Wire>;

/// One encoded FpNum: (p+1)-bit two's complement significand and exponent.
struct FpWires {
  Bits m;
  Bits e;

  Bits bits() const {
    Bits out(m);
    out.insert(out.end(), e.begin(), e.end());
    return out;
  }
  static FpWires from_bits(std::span<const Wire> bits, int p) {
    const auto f = static_cast<std::size_t>(p) + 1;
    if (bits.size() != 2 * f) throw std::invalid_argument("FpWires: width mismatch");
    return {Bits(bits.begin(), bits.begin() + f), Bits(bits.begin() + f, bits.end())};
  }
};

inline Bits constant_bits(CircuitBuilder& b, std::int64_t v, std::size_t width) {
  Bits out;
  for (std::size_t i = 0; i < width; ++i) {
    const bool bit = i < 63 ? ((v >> i) & 1) : v < 0;
    out.push_back(b.constant(bit));
  }
  return out;
}

inline Bits sign_extend(CircuitBuilder& b, const Bits& a, std::size_t width) {
  Bits out(a);
  const Wire fill = a.empty() ? b.zero() : a.back();
  while (out.size() < width) out.push_back(fill);
  out.resize(width);
  return out;
}

inline Bits zero_extend(CircuitBuilder& b, const Bits& a, std::size_t width) {
  Bits out(a);
  while (out.size() < width) out.push_back(b.zero());
  out.resize(width);
  return out;
}

inline Bits not_bits(CircuitBuilder& b, const Bits& a) {
  Bits out;
  for (const Wire& w : a) out.push_back(b.not_(w));
  return out;
}

inline Wire any(CircuitBuilder& b, std::span<const Wire> a) {
  if (a.empty()) return b.zero();
  return b.or_(a);
}

inline Wire xor2(CircuitBuilder& b, Wire x, Wire y) {
  if (auto v = b.constant_value(x)) return *v ? b.not_(y) : y;
  if (auto v = b.constant_value(y)) return *v ? b.not_(x) : x;
  if (x == y) return b.zero();
  return b.and_({b.or_({x, y}), b.not_(b.and_({x, y}))});
}

/// s ? a : c
inline Wire mux(CircuitBuilder& b, Wire s, Wire a, Wire c) {
  if (auto v = b.constant_value(s)) return *v ? a : c;
  if (a == c) return a;
  return b.or_({b.and_({s, a}), b.and_({b.not_(s), c})});
}

inline Bits mux(CircuitBuilder& b, Wire s, const Bits& a, const Bits& c) {
  if (a.size() != c.size()) throw std::logic_error("mux: width mismatch");
  Bits out;
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(mux(b, s, a[i], c[i]));
  return out;
}

inline Bits and_all(CircuitBuilder& b, const Bits& a, Wire s) {
  Bits out;
  for (const Wire& w : a) out.push_back(b.and_({w, s}));
  return out;
}

/// (sum, carry) of three bits; the sum is MAJ(a, b, c, !carry, !carry).
inline std::pair<Wire, Wire> full_add(CircuitBuilder& b, Wire x, Wire y, Wire z) {
  std::vector<Wire> vars;
  int ones = 0;
  for (Wire w : {x, y, z}) {
    if (auto v = b.constant_value(w)) ones += *v;
    else vars.push_back(w);
  }
  switch (vars.size()) {
    case 0: return {b.constant(ones & 1), b.constant(ones >= 2)};
    case 1:
      if (ones == 0) return {vars[0], b.zero()};
      if (ones == 1) return {b.not_(vars[0]), vars[0]};
      return {vars[0], b.one()};
    case 2:
      if (ones == 0) return {xor2(b, vars[0], vars[1]), b.and_({vars[0], vars[1]})};
      return {b.not_(xor2(b, vars[0], vars[1])), b.or_({vars[0], vars[1]})};
    default: {
      const Wire carry = b.majority({x, y, z});
      const Wire nc = b.not_(carry);
      return {b.majority({x, y, z, nc, nc}), carry};
    }
  }
}

/// Ripple-carry a + b + cin modulo 2^width (operands already extended).
inline Bits add(CircuitBuilder& b, const Bits& x, const Bits& y, Wire cin) {
  if (x.size() != y.size()) throw std::logic_error("add: width mismatch");
  Bits out;
  Wire carry = cin;
  for (std::size_t i = 0; i < x.size(); ++i) {
    auto [s, c] = full_add(b, x[i], y[i], carry);
    out.push_back(s);
    carry = c;
  }
  return out;
}

inline Bits add(CircuitBuilder& b, const Bits& x, const Bits& y) { return add(b, x, y, b.zero()); }

inline Bits sub(CircuitBuilder& b, const Bits& x, const Bits& y) { return add(b, x, not_bits(b, y), b.one()); }

inline Bits add_const(CircuitBuilder& b, const Bits& x, std::int64_t k) {
  return add(b, x, constant_bits(b, k, x.size()));
}

inline Bits increment(CircuitBuilder& b, const Bits& x, Wire cin) {
  return add(b, x, constant_bits(b, 0, x.size()), cin);
}

/// Two's complement negation when s is set: bit i flips iff s and a lower bit is set.
inline Bits negate_if(CircuitBuilder& b, const Bits& a, Wire s) {
  Bits out;
  Wire lower = b.zero();
  for (const Wire& w : a) {
    out.push_back(xor2(b, w, b.and_({s, lower})));
    lower = b.or_({lower, w});
  }
  return out;
}

/// Magnitude of a two's complement value (same width; top bit ends up 0).
inline Bits abs_bits(CircuitBuilder& b, const Bits& a) { return negate_if(b, a, a.back()); }

inline Wire msb(const Bits& a) { return a.back(); }

/// floor(a / 2^amt) for signed a, plus whether any 1 bits were shifted out.
/// Any shift of at least a.size() leaves only the sign fill.
inline std::pair<Bits, Wire> shift_right_arith(CircuitBuilder& b, const Bits& a, const Bits& amt) {
  const std::size_t w = a.size();
  const auto stages = static_cast<std::size_t>(std::bit_width(w - 1));
  Bits cur(a);
  const Wire sign = a.back();
  std::vector<Wire> lost;
  for (std::size_t k = 0; k < std::min(stages, amt.size()); ++k) {
    const std::size_t sh = std::size_t{1} << k;
    const Wire s = amt[k];
    lost.push_back(b.and_({s, any(b, std::span<const Wire>(cur).first(std::min(sh, w)))}));
    Bits next;
    for (std::size_t i = 0; i < w; ++i) next.push_back(mux(b, s, i + sh < w ? cur[i + sh] : sign, cur[i]));
    cur = std::move(next);
  }
  if (amt.size() > stages) {
    const Wire high = any(b, std::span<const Wire>(amt).subspan(stages));
    Bits next;
    for (std::size_t i = 0; i < w; ++i) next.push_back(mux(b, high, sign, cur[i]));
    cur = std::move(next);
    const Wire all_out = b.and_({high, any(b, a)});
    return {cur, b.or_({all_out, b.and_({b.not_(high), any(b, lost)})})};
  }
  return {cur, any(b, lost)};
}

/// a * 2^amt into `width` bits; callers size width so nothing is lost.
inline Bits shift_left(CircuitBuilder& b, const Bits& a, const Bits& amt, std::size_t width) {
  Bits cur = zero_extend(b, a, width);
  for (std::size_t k = 0; k < amt.size(); ++k) {
    const std::size_t sh = std::size_t{1} << std::min<std::size_t>(k, 62);
    Bits next;
    for (std::size_t i = 0; i < width; ++i) {
      const Wire moved = (k < 62 && i >= sh) ? cur[i - sh] : b.zero();
      next.push_back(mux(b, amt[k], moved, cur[i]));
    }
    cur = std::move(next);
  }
  return cur;
}

/// Left-normalizes a: returns (a << lz, lz) with the top bit set unless a = 0.
inline std::pair<Bits, Bits> normalize_left(CircuitBuilder& b, const Bits& a) {
  const std::size_t w = a.size();
  const auto stages = static_cast<std::size_t>(std::bit_width(w - 1));
  Bits cur(a);
  Bits lz(stages);
  for (std::size_t k = stages; k-- > 0;) {
    const std::size_t sh = std::size_t{1} << k;
    const Wire z = b.not_(any(b, std::span<const Wire>(cur).last(sh)));
    Bits next;
    for (std::size_t i = 0; i < w; ++i) next.push_back(mux(b, z, i >= sh ? cur[i - sh] : b.zero(), cur[i]));
    cur = std::move(next);
    lz[k] = z;
  }
  return {cur, lz};
}

/// Sum of many unsigned rows modulo 2^width: column-wise 3:2 compression down
/// to two rows, then one ripple addition.
inline Bits csa_sum(CircuitBuilder& b, const std::vector<Bits>& rows, std::size_t width) {
  std::vector<std::vector<Wire>> cols(width);
  for (const Bits& r : rows) {
    for (std::size_t i = 0; i < std::min(r.size(), width); ++i) {
      if (auto v = b.constant_value(r[i]); v && !*v) continue;
      cols[i].push_back(r[i]);
    }
  }
  const auto tall = [&] {
    return std::any_of(cols.begin(), cols.end(), [](const auto& c) { return c.size() > 2; });
  };
  while (tall()) {
    std::vector<std::vector<Wire>> next(width);
    for (std::size_t i = 0; i < width; ++i) {
      auto& c = cols[i];
      std::size_t k = 0;
      for (; k + 3 <= c.size(); k += 3) {
        auto [s, carry] = full_add(b, c[k], c[k + 1], c[k + 2]);
        next[i].push_back(s);
        if (i + 1 < width) next[i + 1].push_back(carry);
      }
      for (; k < c.size(); ++k) next[i].push_back(c[k]);
    }
    cols = std::move(next);
  }
  Bits x, y;
  for (std::size_t i = 0; i < width; ++i) {
    x.push_back(cols[i].size() > 0 ? cols[i][0] : b.zero());
    y.push_back(cols[i].size() > 1 ? cols[i][1] : b.zero());
  }
  return add(b, x, y);
}

inline std::size_t exponent_width(int p, std::size_t e_width, std::size_t mag_width) {
  const auto reach = (std::size_t{1} << (p + 1)) + (std::size_t{1} << e_width) + 2 * mag_width + 8;
  return static_cast<std::size_t>(std::bit_width(reach)) + 2;
}

/// Correct rounding of (-1)^s (mag + f) 2^E to F_p, f in (0, 1) iff sticky
/// (which requires mag to carry at least p + 1 significant bits). Overflow
/// clamps to the largest magnitude, underflow goes to the nearer of zero and
/// the smallest normal (ties to zero).
inline FpWires round_block(CircuitBuilder& b, Wire s, Bits mag, const Bits& E, Wire sticky, int p) {
  const std::size_t w0 = mag.size();
  const auto pu = static_cast<std::size_t>(p);
  if (mag.size() < pu + 2) {
    Bits padded(pu + 2 - mag.size(), b.zero());
    padded.insert(padded.end(), mag.begin(), mag.end());
    mag = std::move(padded);
  }
  const std::size_t w = mag.size();
  auto [n, lz] = normalize_left(b, mag);
  const Wire nonzero = n.back();

  const Bits q0(n.end() - p, n.end());
  const Wire guard = n[w - pu - 1];
  Bits low(n.begin(), n.begin() + static_cast<std::ptrdiff_t>(w - pu - 1));
  low.push_back(sticky);
  const Wire rest = any(b, low);
  const Wire round_up = b.and_({guard, b.or_({rest, q0[0]})});
  const Bits q = increment(b, zero_extend(b, q0, pu + 1), round_up);
  const Wire carry = q[pu];
  Bits sig(q.begin(), q.begin() + p);
  sig[pu - 1] = b.or_({sig[pu - 1], carry});

  const std::size_t we = exponent_width(p, E.size(), w0);
  const Bits ev = sign_extend(b, E, we);
  const Bits er0 = add_const(b, add(b, ev, not_bits(b, zero_extend(b, lz, we)), b.one()),
                             static_cast<std::int64_t>(w0) - p);
  const Bits er = increment(b, er0, carry);
  const std::int64_t emax_plus = std::int64_t{1} << p;
  const Wire overflow = b.and_({nonzero, b.not_(msb(add_const(b, er, -emax_plus)))});
  const Wire underflow = b.and_({nonzero, msb(add_const(b, er, emax_plus))});

  // The leading bit sits at er0 + p - 1; min normal wins iff the value
  // exceeds half of it.
  const Bits t = add_const(b, er0, emax_plus + 1);
  Bits below(n.begin(), n.end() - 1);
  below.push_back(sticky);
  const Wire t_zero = b.not_(any(b, t));
  const Wire above = b.or_({b.and_({b.not_(msb(t)), b.not_(t_zero)}), b.and_({t_zero, any(b, below)})});
  const Wire to_min = b.and_({underflow, above});
  const Wire normal = b.and_({nonzero, b.not_(overflow), b.not_(underflow)});

  const Bits emax_bits = constant_bits(b, emax_plus - 1, pu + 1);
  const Bits emin_bits = constant_bits(b, -emax_plus, pu + 1);
  Bits mag_out, e_out;
  for (std::size_t i = 0; i < pu; ++i) {
    const Wire min_bit = i + 1 == pu ? to_min : b.zero();
    mag_out.push_back(b.or_({b.and_({normal, sig[i]}), overflow, min_bit}));
  }
  mag_out.push_back(b.zero());
  for (std::size_t j = 0; j <= pu; ++j) {
    e_out.push_back(b.or_({b.and_({normal, er[j]}), b.and_({overflow, emax_bits[j]}), b.and_({to_min, emin_bits[j]})}));
  }
  return {negate_if(b, mag_out, s), e_out};
}

inline Wire is_zero(CircuitBuilder& b, const FpWires& x) { return b.not_(any(b, x.m)); }

inline FpWires select(CircuitBuilder& b, Wire s, const FpWires& x, const FpWires& y) {
  return {mux(b, s, x.m, y.m), mux(b, s, x.e, y.e)};
}

inline constexpr std::size_t add_guard = 3;

/// fp_add: align on the larger exponent with three guard bits; far-away
/// addends collapse to floor plus a sticky bit.
inline FpWires fp_add(CircuitBuilder& b, const FpWires& x, const FpWires& y, int p) {
  const std::size_t f = static_cast<std::size_t>(p) + 1;
  const Wire zx = is_zero(b, x), zy = is_zero(b, y);
  const Bits d = sub(b, sign_extend(b, x.e, f + 1), sign_extend(b, y.e, f + 1));
  const Wire x_big = b.not_(msb(d));
  const Bits mb = mux(b, x_big, x.m, y.m);
  const Bits ms = mux(b, x_big, y.m, x.m);
  const Bits eb = mux(b, x_big, x.e, y.e);
  const Bits dist = negate_if(b, d, b.not_(x_big));
  const Bits amount(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(f));

  const std::size_t wa = f + add_guard, ws = wa + 1;
  Bits a(add_guard, b.zero()), small(add_guard, b.zero());
  a.insert(a.end(), mb.begin(), mb.end());
  small.insert(small.end(), ms.begin(), ms.end());
  auto [t, sticky] = shift_right_arith(b, small, amount);
  const Bits sum = add(b, sign_extend(b, a, ws), sign_extend(b, t, ws));
  const Wire s = msb(sum);
  Bits flipped;
  for (const Wire& w : sum) flipped.push_back(xor2(b, w, s));
  const Bits mag = increment(b, flipped, b.and_({s, b.not_(sticky)}));
  const Bits e = add_const(b, sign_extend(b, eb, f + 2), -static_cast<std::int64_t>(add_guard));
  const FpWires r = round_block(b, s, mag, e, sticky, p);
  return select(b, zx, y, select(b, zy, x, r));
}

/// fp_mul: exact product of the magnitudes via a carry-save tree, rounded once.
inline FpWires fp_mul(CircuitBuilder& b, const FpWires& x, const FpWires& y, int p) {
  const std::size_t pu = static_cast<std::size_t>(p), f = pu + 1;
  const Bits ax = abs_bits(b, x.m), ay = abs_bits(b, y.m);
  std::vector<Bits> rows;
  for (std::size_t j = 0; j < pu; ++j) {
    Bits row(j, b.zero());
    for (std::size_t i = 0; i < pu; ++i) row.push_back(b.and_({ax[i], ay[j]}));
    rows.push_back(std::move(row));
  }
  const Bits product = csa_sum(b, rows, 2 * pu);
  const Wire s = xor2(b, msb(x.m), msb(y.m));
  const Bits e = add(b, sign_extend(b, x.e, f + 1), sign_extend(b, y.e, f + 1));
  return round_block(b, s, product, e, b.zero(), p);
}

/// Integer key monotone in the value: zero -> 0, otherwise
/// +-((e + 2^p) 2^p + |m|).
inline Bits order_key(CircuitBuilder& b, const FpWires& x, int p) {
  const std::size_t pu = static_cast<std::size_t>(p);
  const Wire nz = b.not_(is_zero(b, x));
  Bits key;
  const Bits ax = abs_bits(b, x.m);
  for (std::size_t i = 0; i < pu; ++i) key.push_back(b.and_({ax[i], nz}));
  for (std::size_t j = 0; j <= pu; ++j) {
    const Wire bit = j == pu ? b.not_(x.e[j]) : x.e[j];
    key.push_back(b.and_({bit, nz}));
  }
  key.push_back(b.zero());
  return negate_if(b, key, msb(x.m));
}

/// (x < y, x > y)
inline std::array<Wire, 2> fp_cmp(CircuitBuilder& b, const FpWires& x, const FpWires& y, int p) {
  const std::size_t width = 2 * static_cast<std::size_t>(p) + 3;
  const Bits kx = sign_extend(b, order_key(b, x, p), width);
  const Bits ky = sign_extend(b, order_key(b, y, p), width);
  return {msb(sub(b, kx, ky)), msb(sub(b, ky, kx))};
}

/// max(x, 0): every bit masked by the inverted sign.
inline FpWires relu(CircuitBuilder& b, const FpWires& x) {
  const Wire keep = b.not_(msb(x.m));
  return {and_all(b, x.m, keep), and_all(b, x.e, keep)};
}

/// Exact sum of all terms on a fixed window covering every exponent,
/// positive and negative parts reduced separately, then rounded once.
inline FpWires iter_add(CircuitBuilder& b, std::span<const FpWires> xs, int p) {
  const std::size_t pu = static_cast<std::size_t>(p);
  if (xs.empty()) return {constant_bits(b, 0, pu + 1), constant_bits(b, 0, pu + 1)};
  const std::size_t window = pu + (std::size_t{1} << (p + 1));
  const std::size_t width = window + static_cast<std::size_t>(std::bit_width(xs.size())) + 1;
  std::vector<Bits> pos, neg;
  for (const FpWires& x : xs) {
    const Bits ax = abs_bits(b, x.m);
    Bits biased(x.e);
    biased.back() = b.not_(biased.back());
    const Bits placed = shift_left(b, Bits(ax.begin(), ax.begin() + p), biased, window);
    const Wire s = msb(x.m);
    pos.push_back(and_all(b, placed, b.not_(s)));
    neg.push_back(and_all(b, placed, s));
  }
  const Bits total = sub(b, csa_sum(b, pos, width), csa_sum(b, neg, width));
  const Wire s = msb(total);
  const Bits e = constant_bits(b, -(std::int64_t{1} << p), pu + 2);
  return round_block(b, s, negate_if(b, total, s), e, b.zero(), p);
}

}  // namespace hopcirc::gadget
