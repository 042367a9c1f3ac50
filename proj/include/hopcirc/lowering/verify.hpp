#pragma once

#include "hopcirc/lowering/formula.hpp"
#include "hopcirc/lowering/network.hpp"

#include <sstream>

namespace hopcirc {

struct Divergence {
  std::size_t row = 0;
  std::size_t col = 0;
  FpNum expected;
  std::optional<FpNum> got;  // empty when the output bits are not a valid encoding
  std::string got_bits;
};

struct EquivalenceReport {
  std::string construct;
  std::string error;  // set when either side could not be evaluated
  // The reference raised a domain error (e.g. division by a zero row sum);
  // the circuit agrees when its own evaluation fails the same way.
  bool reference_undefined = false;
  bool circuit_undefined = false;
  bool bit_exact = false;
  std::size_t mismatched_entries = 0;
  std::optional<Divergence> first_divergence;
  std::optional<std::uint32_t> fault_gate;
  std::string fault_region;
  std::vector<std::uint32_t> failed_macros;
  DepthExpr measured_depth;
  DepthFormula formula;
  bool depth_matches = false;

  /// Same output bits, or both sides undefined on this input.
  bool agrees() const { return bit_exact || (reference_undefined && circuit_undefined); }
  bool ok() const { return agrees() && depth_matches && (error.empty() || reference_undefined); }
};

namespace detail {

inline std::string bit_string(std::span<const std::uint8_t> bits) {
  std::string s;
  for (const auto b : bits) s.push_back(b ? '1' : '0');
  return s;
}

inline std::string region_path(const Circuit& c, std::int32_t r) {
  std::string path;
  for (; r >= 0; r = c.regions[r].parent) path = path.empty() ? c.regions[r].label : c.regions[r].label + " > " + path;
  return path.empty() ? "(no region)" : path;
}

/// First gate, in id order, whose outputs differ from the same gate in a
/// fresh lowering of the same construct.
inline std::optional<std::uint32_t> first_differing_gate(const Circuit& suspect, const Circuit& fresh,
                                                         std::span<const std::uint8_t> bits) {
  if (suspect.gates.size() != fresh.gates.size()) return std::nullopt;
  const GateValues a = evaluate_all(suspect, bits, MacroErrors::record);
  const GateValues b = evaluate_all(fresh, bits, MacroErrors::record);
  for (std::uint32_t g = 0; g < suspect.gates.size(); ++g) {
    const auto x = a.of(g), y = b.of(g);
    if (!std::equal(x.begin(), x.end(), y.begin(), y.end())) return g;
    if (!(suspect.gates[g].kind == fresh.gates[g].kind) ||
        !std::ranges::equal(suspect.fanin(g), fresh.fanin(g))) {
      return g;
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Evaluates the artifact's circuit and the reference forward pass on the
/// same inputs; reports agreement, the first divergent entry and, when the
/// circuit departs from a fresh lowering, the first differing gate.
inline EquivalenceReport verify_equivalence(const LoweredArtifact& a, const ConstructConfig& cfg,
                                            std::span<const FpMatrix> inputs) {
  EquivalenceReport r;
  r.construct = to_string(cfg.construct);
  r.formula = depth_formula(cfg);
  try {
    r.measured_depth = measure(a.circuit).symbolic_depth;
    r.depth_matches = r.measured_depth == r.formula.value;
  } catch (const std::exception& e) {
    r.error = std::string("measure: ") + e.what();
    return r;
  }

  std::vector<std::uint8_t> bits;
  try {
    bits = encode_construct_inputs(cfg, inputs);
  } catch (const std::exception& e) {
    r.error = std::string("inputs: ") + e.what();
    return r;
  }
  if (bits.size() != a.circuit.inputs.size() || a.output_shape != construct_output_shape(cfg)) {
    r.error = "artifact does not match the construct configuration";
    return r;
  }
  FpMatrix expected;
  try {
    expected = reference_forward(cfg, inputs);
  } catch (const std::domain_error& e) {
    r.error = std::string("reference: ") + e.what();
    r.reference_undefined = true;
    try {
      evaluate(a.circuit, bits);
    } catch (const std::exception&) {
      r.circuit_undefined = true;
    }
    return r;
  }

  const GateValues values = evaluate_all(a.circuit, bits, MacroErrors::record);
  r.failed_macros = values.failed_macros;
  const std::vector<std::uint8_t> out = read_outputs(a.circuit, values);
  const FpBitEncoding enc{cfg.p};
  if (out.size() != expected.size() * enc.width()) {
    r.error = "circuit output width does not match the reference result";
    return r;
  }
  for (std::size_t k = 0; k < expected.size(); ++k) {
    const auto chunk = std::span(out).subspan(k * enc.width(), enc.width());
    std::optional<FpNum> got;
    try {
      got = enc.decode(chunk);
    } catch (const std::invalid_argument&) {
    }
    if (got && *got == expected.entries()[k]) continue;
    ++r.mismatched_entries;
    if (!r.first_divergence) {
      r.first_divergence = Divergence{k / expected.cols(), k % expected.cols(), expected.entries()[k], got,
                                      detail::bit_string(chunk)};
    }
  }
  r.bit_exact = r.mismatched_entries == 0;
  if (!r.bit_exact) {
    const LoweredArtifact fresh = lower_construct(cfg);
    r.fault_gate = detail::first_differing_gate(a.circuit, fresh.circuit, bits);
    if (r.fault_gate) r.fault_region = detail::region_path(a.circuit, a.circuit.gates[*r.fault_gate].region);
  }
  return r;
}

inline std::string to_string(const EquivalenceReport& r) {
  std::ostringstream os;
  os << r.construct << ": ";
  if (!r.error.empty()) {
    os << "error: " << r.error;
    if (r.reference_undefined) os << (r.circuit_undefined ? " (circuit also undefined)" : " (circuit produced output)");
    return os.str();
  }
  if (r.bit_exact) {
    os << "bit-exact";
  } else {
    const Divergence& d = *r.first_divergence;
    os << r.mismatched_entries << " entries differ; first at (" << d.row << "," << d.col << "): expected "
       << to_string(d.expected) << ", got " << (d.got ? to_string(*d.got) : "invalid encoding " + d.got_bits);
    if (r.fault_gate) os << "; first differing gate " << *r.fault_gate << " in " << r.fault_region;
  }
  os << "; depth " << to_string(r.measured_depth) << (r.depth_matches ? " = " : " != ") << to_string(r.formula.value);
  return os.str();
}

}  // namespace hopcirc
