#pragma once

#include "hopcirc/circuit/depth.hpp"
#include "hopcirc/circuit/encoding.hpp"
#include "hopcirc/fp.hpp"

#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hopcirc {

enum class GateKind : std::uint8_t { input, constant, not_gate, and_gate, or_gate, majority, macro };

/// Macro tags: the four opaque constructions plus the scalar ops that fall
/// back to macros above the concrete-lowering precision cap.
enum class MacroTag : std::uint8_t { exp, div, sqrt, iter_mul, add, mul, cmp, iter_add };

inline const char* to_string(GateKind k) {
  switch (k) {
    case GateKind::input: return "input";
    case GateKind::constant: return "const";
    case GateKind::not_gate: return "not";
    case GateKind::and_gate: return "and";
    case GateKind::or_gate: return "or";
    case GateKind::majority: return "maj";
    case GateKind::macro: return "macro";
  }
  return "?";
}

inline const char* to_string(MacroTag t) {
  switch (t) {
    case MacroTag::exp: return "exp";
    case MacroTag::div: return "div";
    case MacroTag::sqrt: return "sqrt";
    case MacroTag::iter_mul: return "iter_mul";
    case MacroTag::add: return "add";
    case MacroTag::mul: return "mul";
    case MacroTag::cmp: return "cmp";
    case MacroTag::iter_add: return "iter_add";
  }
  return "?";
}

inline MacroTag parse_macro_tag(const std::string& s) {
  for (auto t : {MacroTag::exp, MacroTag::div, MacroTag::sqrt, MacroTag::iter_mul, MacroTag::add, MacroTag::mul,
                 MacroTag::cmp, MacroTag::iter_add}) {
    if (s == to_string(t)) return t;
  }
  throw std::invalid_argument("unknown macro tag '" + s + "'");
}

/// Symbolic depth a macro of this tag stands for.
inline DepthExpr macro_charge(MacroTag t) {
  switch (t) {
    case MacroTag::exp: return DepthExpr::exp();
    case MacroTag::sqrt: return DepthExpr::sqrt();
    case MacroTag::iter_mul: return DepthExpr::prod();
    case MacroTag::iter_add: return DepthExpr::sum();
    default: return DepthExpr::std_op();
  }
}

struct MacroInfo {
  MacroTag tag;
  int p;
  std::uint32_t arity;

  std::size_t in_width() const { return arity * FpBitEncoding{p}.width(); }
  std::size_t out_width() const { return tag == MacroTag::cmp ? 2 : FpBitEncoding{p}.width(); }
  friend bool operator==(const MacroInfo&, const MacroInfo&) = default;
};

/// One output bit of a gate; non-macro gates only have bit 0.
struct Wire {
  std::uint32_t gate = 0;
  std::uint32_t bit = 0;
  friend bool operator==(const Wire&, const Wire&) = default;
};

struct Gate {
  GateKind kind = GateKind::input;
  bool value = false;  // constants only
  std::uint32_t first = 0;  // into Circuit::fanins
  std::uint32_t count = 0;
  std::int32_t region = -1;
  std::int32_t macro = -1;  // into Circuit::macros
  friend bool operator==(const Gate&, const Gate&) = default;
};

/// Scalar-op boundary marker. Gates carry the id of the innermost region they
/// belong to; the outermost opaque ancestor (or the region itself) is the unit
/// whose charge a path pays once on entry.
struct Region {
  std::int32_t parent = -1;
  bool opaque = false;
  DepthExpr charge;
  std::string label;
  friend bool operator==(const Region&, const Region&) = default;
};

struct Circuit {
  std::size_t width = 0;  // bits per FpNum
  std::vector<Gate> gates;
  std::vector<Wire> fanins;
  std::vector<std::uint32_t> inputs;
  std::vector<Wire> outputs;
  std::vector<Region> regions;
  std::vector<MacroInfo> macros;

  std::span<const Wire> fanin(std::uint32_t g) const {
    return {fanins.data() + gates[g].first, gates[g].count};
  }
  std::size_t out_width(std::uint32_t g) const {
    const Gate& gate = gates[g];
    if (gate.kind != GateKind::macro) return 1;
    if (gate.macro < 0 || static_cast<std::size_t>(gate.macro) >= macros.size()) return 1;
    return macros[gate.macro].out_width();
  }

  friend bool operator==(const Circuit&, const Circuit&) = default;
};

/// Structural checks; never throws.
inline std::vector<std::string> validate(const Circuit& c) {
  std::vector<std::string> out;
  const auto where = [](std::size_t g) { return "gate " + std::to_string(g) + ": "; };
  for (std::size_t r = 0; r < c.regions.size(); ++r) {
    const auto parent = c.regions[r].parent;
    if (parent >= static_cast<std::int64_t>(r) || parent < -1) {
      out.push_back("region " + std::to_string(r) + ": order: parent " + std::to_string(parent) + " is not earlier");
    }
  }
  for (std::size_t g = 0; g < c.gates.size(); ++g) {
    const Gate& gate = c.gates[g];
    if (static_cast<std::size_t>(gate.first) + gate.count > c.fanins.size()) {
      out.push_back(where(g) + "fan-in range out of bounds");
      continue;
    }
    for (const Wire& w : c.fanin(static_cast<std::uint32_t>(g))) {
      if (w.gate >= g) {
        out.push_back(where(g) + "cycle/order: references gate " + std::to_string(w.gate));
      } else if (w.bit >= c.out_width(w.gate)) {
        out.push_back(where(g) + "width: bit " + std::to_string(w.bit) + " of gate " + std::to_string(w.gate));
      }
    }
    switch (gate.kind) {
      case GateKind::input:
      case GateKind::constant:
        if (gate.count != 0) out.push_back(where(g) + "arity: " + to_string(gate.kind) + " takes no fan-in");
        break;
      case GateKind::not_gate:
        if (gate.count != 1) out.push_back(where(g) + "arity: not takes exactly 1 fan-in, got " +
                                           std::to_string(gate.count));
        break;
      case GateKind::and_gate:
      case GateKind::or_gate:
      case GateKind::majority:
        if (gate.count < 1) out.push_back(where(g) + "arity: " + to_string(gate.kind) + " needs fan-in >= 1");
        break;
      case GateKind::macro:
        if (gate.macro < 0 || static_cast<std::size_t>(gate.macro) >= c.macros.size()) {
          out.push_back(where(g) + "macro: unknown descriptor " + std::to_string(gate.macro));
        } else {
          const MacroInfo& m = c.macros[gate.macro];
          const bool unary = m.tag == MacroTag::exp || m.tag == MacroTag::sqrt;
          const bool binary = m.tag == MacroTag::div || m.tag == MacroTag::add || m.tag == MacroTag::mul ||
                              m.tag == MacroTag::cmp;
          if (m.p < 2 || m.p > 30 || m.arity < 1 || (unary && m.arity != 1) || (binary && m.arity != 2)) {
            out.push_back(where(g) + "macro: bad descriptor " + std::string(to_string(m.tag)));
          } else if (gate.count != m.in_width()) {
            out.push_back(where(g) + "width: macro " + to_string(m.tag) + " expects " +
                          std::to_string(m.in_width()) + " input bits, got " + std::to_string(gate.count));
          }
        }
        break;
    }
    if (gate.region < -1 || gate.region >= static_cast<std::int64_t>(c.regions.size())) {
      out.push_back(where(g) + "region: unknown region " + std::to_string(gate.region));
    }
  }
  std::vector<std::uint8_t> listed(c.gates.size(), 0);
  for (std::size_t k = 0; k < c.inputs.size(); ++k) {
    const auto g = c.inputs[k];
    if (g >= c.gates.size() || c.gates[g].kind != GateKind::input) {
      out.push_back("input " + std::to_string(k) + ": gate " + std::to_string(g) + " is not an input gate");
    } else if (listed[g]++) {
      out.push_back("input " + std::to_string(k) + ": gate " + std::to_string(g) + " listed twice");
    }
  }
  for (std::size_t g = 0; g < c.gates.size(); ++g) {
    if (c.gates[g].kind == GateKind::input && !listed[g]) {
      out.push_back(where(g) + "input gate missing from the input list");
    }
  }
  for (std::size_t k = 0; k < c.outputs.size(); ++k) {
    const Wire& w = c.outputs[k];
    if (w.gate >= c.gates.size() || w.bit >= c.out_width(w.gate)) {
      out.push_back("output " + std::to_string(k) + ": missing gate " + std::to_string(w.gate));
    }
  }
  return out;
}

inline void require_valid(const Circuit& c) {
  const auto v = validate(c);
  if (!v.empty()) throw std::invalid_argument("invalid circuit: " + v.front());
}

/// Values of every gate output bit, in gate order.
struct GateValues {
  std::vector<std::size_t> offset;  // first bit of each gate, plus a sentinel
  std::vector<std::uint8_t> bits;
  std::vector<std::uint32_t> failed_macros;  // lenient evaluation only

  std::uint8_t at(Wire w) const { return bits[offset[w.gate] + w.bit]; }
  std::span<const std::uint8_t> of(std::uint32_t g) const {
    return {bits.data() + offset[g], offset[g + 1] - offset[g]};
  }
};

namespace detail {

inline void apply_macro(const MacroInfo& m, std::span<const std::uint8_t> in, std::span<std::uint8_t> out) {
  const std::vector<FpNum> xs = decode_all(in, m.p);
  std::vector<std::uint8_t> bits;
  const FpBitEncoding enc{m.p};
  switch (m.tag) {
    case MacroTag::exp: bits = enc.encode(fp_exp(xs[0])); break;
    case MacroTag::sqrt: bits = enc.encode(fp_sqrt(xs[0])); break;
    case MacroTag::div: bits = enc.encode(fp_div(xs[0], xs[1])); break;
    case MacroTag::add: bits = enc.encode(fp_add(xs[0], xs[1])); break;
    case MacroTag::mul: bits = enc.encode(fp_mul(xs[0], xs[1])); break;
    case MacroTag::iter_mul: bits = enc.encode(iter_mul(xs, m.p)); break;
    case MacroTag::iter_add: bits = enc.encode(iter_add(xs, m.p)); break;
    case MacroTag::cmp: {
      const auto ord = fp_cmp(xs[0], xs[1]);
      bits = {static_cast<std::uint8_t>(ord < 0), static_cast<std::uint8_t>(ord > 0)};
      break;
    }
  }
  std::copy(bits.begin(), bits.end(), out.begin());
}

inline std::uint8_t eval_gate(const Circuit& c, std::uint32_t g, const GateValues& v) {
  const Gate& gate = c.gates[g];
  const auto ins = c.fanin(g);
  switch (gate.kind) {
    case GateKind::constant: return gate.value;
    case GateKind::not_gate: return !v.at(ins[0]);
    case GateKind::and_gate:
      for (const Wire& w : ins)
        if (!v.at(w)) return 0;
      return 1;
    case GateKind::or_gate:
      for (const Wire& w : ins)
        if (v.at(w)) return 1;
      return 0;
    case GateKind::majority: {
      std::size_t ones = 0;
      for (const Wire& w : ins) ones += v.at(w);
      return ones >= ins.size() / 2 + 1;
    }
    default: return 0;
  }
}

}  // namespace detail

/// Evaluates every gate following `schedule` (any order in which each gate
/// comes after the gates it reads). Macros decode, delegate and re-encode; a
/// malformed encoding reaching a macro throws std::invalid_argument. With
/// MacroErrors::record, a macro that cannot evaluate outputs zeros and is
/// listed in failed_macros instead.
enum class MacroErrors { raise, record };

inline GateValues evaluate_all(const Circuit& c, std::span<const std::uint8_t> input_bits,
                               std::span<const std::uint32_t> schedule, MacroErrors on_error = MacroErrors::raise) {
  if (input_bits.size() != c.inputs.size()) {
    throw std::invalid_argument("evaluate: expected " + std::to_string(c.inputs.size()) + " input bits, got " +
                                std::to_string(input_bits.size()));
  }
  if (schedule.size() != c.gates.size()) throw std::invalid_argument("evaluate: schedule must cover every gate");
  GateValues v;
  v.offset.resize(c.gates.size() + 1);
  for (std::uint32_t g = 0; g < c.gates.size(); ++g) v.offset[g + 1] = v.offset[g] + c.out_width(g);
  v.bits.assign(v.offset.back(), 0);
  for (std::size_t k = 0; k < c.inputs.size(); ++k) v.bits[v.offset[c.inputs[k]]] = input_bits[k] & 1;

  std::vector<std::uint8_t> done(c.gates.size(), 0);
  std::vector<std::uint8_t> scratch;
  for (const std::uint32_t g : schedule) {
    if (g >= c.gates.size() || done[g]) throw std::invalid_argument("evaluate: schedule is not a permutation");
    const Gate& gate = c.gates[g];
    const auto ins = c.fanin(g);
    for (const Wire& w : ins) {
      if (!done[w.gate]) {
        throw std::invalid_argument("evaluate: schedule runs gate " + std::to_string(g) + " before gate " +
                                    std::to_string(w.gate));
      }
    }
    if (gate.kind == GateKind::macro) {
      scratch.clear();
      for (const Wire& w : ins) scratch.push_back(v.at(w));
      const MacroInfo& m = c.macros.at(gate.macro);
      if (scratch.size() != m.in_width()) throw std::invalid_argument("evaluate: macro width mismatch");
      if (on_error == MacroErrors::raise) {
        detail::apply_macro(m, scratch, {v.bits.data() + v.offset[g], m.out_width()});
      } else {
        try {
          detail::apply_macro(m, scratch, {v.bits.data() + v.offset[g], m.out_width()});
        } catch (const std::exception&) {
          v.failed_macros.push_back(g);
        }
      }
    } else if (gate.kind != GateKind::input) {
      v.bits[v.offset[g]] = detail::eval_gate(c, g, v);
    }
    done[g] = 1;
  }
  return v;
}

inline std::vector<std::uint32_t> identity_schedule(const Circuit& c) {
  std::vector<std::uint32_t> s(c.gates.size());
  std::iota(s.begin(), s.end(), 0u);
  return s;
}

/// Gates grouped by concrete level, highest gate id first within a level: a
/// valid schedule that differs from the stored order whenever levels interleave.
inline std::vector<std::uint32_t> level_schedule(const Circuit& c) {
  std::vector<std::uint32_t> level(c.gates.size(), 0);
  for (std::uint32_t g = 0; g < c.gates.size(); ++g) {
    for (const Wire& w : c.fanin(g)) level[g] = std::max(level[g], level[w.gate] + 1);
  }
  std::vector<std::uint32_t> s = identity_schedule(c);
  std::stable_sort(s.begin(), s.end(), [&](std::uint32_t a, std::uint32_t b) {
    return level[a] != level[b] ? level[a] < level[b] : a > b;
  });
  return s;
}

inline GateValues evaluate_all(const Circuit& c, std::span<const std::uint8_t> input_bits,
                               MacroErrors on_error = MacroErrors::raise) {
  const auto s = identity_schedule(c);
  return evaluate_all(c, input_bits, s, on_error);
}

inline std::vector<std::uint8_t> read_outputs(const Circuit& c, const GateValues& v) {
  std::vector<std::uint8_t> out;
  out.reserve(c.outputs.size());
  for (const Wire& w : c.outputs) out.push_back(v.at(w));
  return out;
}

inline std::vector<std::uint8_t> evaluate(const Circuit& c, std::span<const std::uint8_t> input_bits) {
  return read_outputs(c, evaluate_all(c, input_bits));
}

inline std::vector<std::uint8_t> evaluate(const Circuit& c, std::span<const std::uint8_t> input_bits,
                                          std::span<const std::uint32_t> schedule) {
  return read_outputs(c, evaluate_all(c, input_bits, schedule));
}

struct Measurement {
  std::size_t size = 0;
  std::size_t concrete_depth = 0;
  DepthExpr symbolic_depth;
};

/// Size, longest path counting every non-macro logic gate as 1, and symbolic
/// depth: along each path, every maximal run inside one unit pays that unit's
/// charge; paths are joined coefficientwise. Throws std::invalid_argument for
/// a logic gate outside every region.
inline Measurement measure(const Circuit& c) {
  require_valid(c);
  Measurement out;
  out.size = c.gates.size();

  std::vector<std::int32_t> unit_of_region(c.regions.size());
  for (std::size_t r = 0; r < c.regions.size(); ++r) {
    std::int32_t unit = static_cast<std::int32_t>(r);
    for (std::int32_t a = static_cast<std::int32_t>(r); a >= 0; a = c.regions[a].parent) {
      if (c.regions[a].opaque) unit = a;
    }
    unit_of_region[r] = unit;
  }

  using Compact = std::array<std::int32_t, depth_term_count>;
  const auto to_compact = [](const DepthExpr& d) {
    Compact x{};
    for (int i = 0; i < depth_term_count; ++i) x[i] = static_cast<std::int32_t>(d.c[i]);
    return x;
  };
  const std::int64_t synthetic = static_cast<std::int64_t>(c.regions.size());
  std::vector<std::int64_t> unit(c.gates.size(), -1);
  std::vector<Compact> before(c.gates.size()), after(c.gates.size());
  std::vector<std::size_t> level(c.gates.size(), 0);
  std::vector<Compact> region_charge;
  for (const Region& r : c.regions) region_charge.push_back(to_compact(r.charge));

  for (std::uint32_t g = 0; g < c.gates.size(); ++g) {
    const Gate& gate = c.gates[g];
    if (gate.kind == GateKind::input || gate.kind == GateKind::constant) continue;
    Compact charge{};
    if (gate.region >= 0) {
      unit[g] = unit_of_region[gate.region];
      charge = region_charge[unit[g]];
    } else if (gate.kind == GateKind::macro) {
      unit[g] = synthetic + g;
      charge = to_compact(macro_charge(c.macros[gate.macro].tag));
    } else {
      throw std::invalid_argument("measure: gate " + std::to_string(g) + " (" + to_string(gate.kind) +
                                  ") is not inside any marked region");
    }
    Compact acc{};
    std::size_t lv = 0;
    for (const Wire& w : c.fanin(g)) {
      const Compact& from = unit[w.gate] == unit[g] ? before[w.gate] : after[w.gate];
      for (int i = 0; i < depth_term_count; ++i) acc[i] = std::max(acc[i], from[i]);
      lv = std::max(lv, level[w.gate]);
    }
    before[g] = acc;
    for (int i = 0; i < depth_term_count; ++i) acc[i] += charge[i];
    after[g] = acc;
    level[g] = lv + (gate.kind == GateKind::macro ? 0 : 1);
  }
  for (const Wire& w : c.outputs) {
    for (int i = 0; i < depth_term_count; ++i) {
      out.symbolic_depth.c[i] = std::max<std::int64_t>(out.symbolic_depth.c[i], after[w.gate][i]);
    }
    out.concrete_depth = std::max(out.concrete_depth, level[w.gate]);
  }
  return out;
}

/// Rewires fan-in `index` of gate `g` to `to` (which must precede g).
inline void redirect_fanin(Circuit& c, std::uint32_t g, std::uint32_t index, Wire to) {
  if (g >= c.gates.size() || index >= c.gates[g].count) throw std::out_of_range("redirect_fanin: no such fan-in");
  if (to.gate >= g) throw std::invalid_argument("redirect_fanin: target must precede the gate");
  c.fanins[c.gates[g].first + index] = to;
}

}  // namespace hopcirc
