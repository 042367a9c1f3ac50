#pragma once

#include "hopcirc/lowering/gadgets.hpp"

#include <cstdlib>

namespace hopcirc {

using gadget::Bits;
using gadget::FpWires;

inline constexpr int default_max_concrete_p = 8;

/// Concrete-lowering precision cap; HOPCIRC_MAX_CONCRETE_P overrides it.
inline int max_concrete_p() {
  if (const char* env = std::getenv("HOPCIRC_MAX_CONCRETE_P")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 2 && v <= 30) return static_cast<int>(v);
  }
  return default_max_concrete_p;
}

/// Builds F_p dataflow circuits: every scalar operation becomes one marked
/// region charged with its symbolic depth. Above the concrete cap, add, mul,
/// cmp and iter_add become macro gates carrying the same charges.
class FpCircuitBuilder {
 public:
  explicit FpCircuitBuilder(int p, int concrete_cap = max_concrete_p())
      : p_(p), concrete_(p <= concrete_cap), b_(FpBitEncoding{p}.width()) {
    check_precision(p);
  }

  int precision() const { return p_; }
  bool concrete() const { return concrete_; }
  CircuitBuilder& gates() { return b_; }

  FpWires input() {
    const Bits bits = b_.inputs(FpBitEncoding{p_}.width());
    return FpWires::from_bits(bits, p_);
  }
  void output(const FpWires& x) {
    const Bits bits = x.bits();
    b_.outputs(bits);
  }

  /// Label prefix for regions opened from here on.
  void set_context(std::string ctx) { ctx_ = std::move(ctx); }

  FpWires add(const FpWires& x, const FpWires& y) {
    CircuitBuilder::Scope s(b_, label("add"), DepthExpr::std_op());
    if (!concrete_) return fallback(MacroTag::add, {x, y});
    return gadget::fp_add(b_, x, y, p_);
  }
  FpWires mul(const FpWires& x, const FpWires& y) {
    CircuitBuilder::Scope s(b_, label("mul"), DepthExpr::std_op());
    if (!concrete_) return fallback(MacroTag::mul, {x, y});
    return gadget::fp_mul(b_, x, y, p_);
  }
  std::array<Wire, 2> cmp(const FpWires& x, const FpWires& y) {
    CircuitBuilder::Scope s(b_, label("cmp"), DepthExpr::std_op());
    if (!concrete_) {
      const Bits in = concat({x, y});
      const auto out = b_.macro({MacroTag::cmp, p_, 2}, in);
      return {out[0], out[1]};
    }
    return gadget::fp_cmp(b_, x, y, p_);
  }
  FpWires relu(const FpWires& x) {
    CircuitBuilder::Scope s(b_, label("relu"), DepthExpr::std_op());
    return gadget::relu(b_, x);
  }
  FpWires iter_add(std::span<const FpWires> xs) {
    CircuitBuilder::Scope s(b_, label("iter_add"), DepthExpr::sum());
    if (!concrete_) return fallback(MacroTag::iter_add, xs);
    return gadget::iter_add(b_, xs, p_);
  }

  FpWires exp(const FpWires& x) { return macro(MacroTag::exp, {x}); }
  FpWires sqrt(const FpWires& x) { return macro(MacroTag::sqrt, {x}); }
  FpWires div(const FpWires& x, const FpWires& y) { return macro(MacroTag::div, {x, y}); }
  FpWires iter_mul(std::span<const FpWires> xs) { return macro(MacroTag::iter_mul, xs); }

  /// Opaque component region: everything built inside `body` is one unit
  /// charged d_f.
  template <class Body>
  auto component(const std::string& name, Body&& body) {
    CircuitBuilder::Scope s(b_, label(name), DepthExpr::f(), true);
    return body();
  }

  /// Pass-through that still occupies a gate (identity components).
  FpWires buffer(const FpWires& x) {
    FpWires out;
    for (const Wire& w : x.m) out.m.push_back(b_.buffer(w));
    for (const Wire& w : x.e) out.e.push_back(b_.buffer(w));
    return out;
  }

  Circuit seal() && { return std::move(b_).seal(); }

 private:
  std::string label(const char* op) const { return ctx_.empty() ? op : ctx_ + "/" + op; }
  std::string label(const std::string& op) const { return label(op.c_str()); }

  static Bits concat(std::span<const FpWires> xs) {
    Bits in;
    for (const FpWires& x : xs) {
      in.insert(in.end(), x.m.begin(), x.m.end());
      in.insert(in.end(), x.e.begin(), x.e.end());
    }
    return in;
  }
  static Bits concat(std::initializer_list<FpWires> xs) { return concat(std::span(xs.begin(), xs.size())); }

  FpWires fallback(MacroTag tag, std::span<const FpWires> xs) {
    const Bits in = concat(xs);
    return FpWires::from_bits(b_.macro({tag, p_, static_cast<std::uint32_t>(xs.size())}, in), p_);
  }
  FpWires fallback(MacroTag tag, std::initializer_list<FpWires> xs) {
    return fallback(tag, std::span(xs.begin(), xs.size()));
  }

  FpWires macro(MacroTag tag, std::span<const FpWires> xs) {
    CircuitBuilder::Scope s(b_, label(to_string(tag)), macro_charge(tag));
    return fallback(tag, xs);
  }
  FpWires macro(MacroTag tag, std::initializer_list<FpWires> xs) {
    return macro(tag, std::span(xs.begin(), xs.size()));
  }

  int p_;
  bool concrete_;
  CircuitBuilder b_;
  std::string ctx_;
};

enum class ScalarKind { add, mul, cmp, iter_add };
enum class MacroKind { exp, div, sqrt, iter_mul };

inline const char* to_string(ScalarKind k) {
  switch (k) {
    case ScalarKind::add: return "add";
    case ScalarKind::mul: return "mul";
    case ScalarKind::cmp: return "cmp";
    case ScalarKind::iter_add: return "iter_add";
  }
  return "?";
}

inline const char* to_string(MacroKind k) {
  switch (k) {
    case MacroKind::exp: return "exp";
    case MacroKind::div: return "div";
    case MacroKind::sqrt: return "sqrt";
    case MacroKind::iter_mul: return "iter_mul";
  }
  return "?";
}

/// A lowered circuit together with its measured symbolic depth and what it
/// computes. Inputs are the listed operands' encodings, concatenated in order.
struct LoweredArtifact {
  Circuit circuit;
  DepthExpr depth;
  std::string construct;
  int p = 0;
  std::vector<std::pair<std::size_t, std::size_t>> input_shapes;
  std::vector<std::string> input_names;
  std::pair<std::size_t, std::size_t> output_shape{1, 1};
};

inline LoweredArtifact finish(FpCircuitBuilder&& fb, std::string construct) {
  LoweredArtifact a;
  a.p = fb.precision();
  a.circuit = std::move(fb).seal();
  a.depth = measure(a.circuit).symbolic_depth;
  a.construct = std::move(construct);
  return a;
}

/// Gate-level circuit for one scalar op (n operands for iter_add; cmp outputs
/// the two bits x < y, x > y). Throws std::invalid_argument above the cap.
inline LoweredArtifact lower_scalar(ScalarKind kind, int p, std::size_t n = 2) {
  const int cap = max_concrete_p();
  if (p > cap) {
    throw std::invalid_argument("lower_scalar: p = " + std::to_string(p) + " exceeds the concrete-lowering cap " +
                                std::to_string(cap) + " (set HOPCIRC_MAX_CONCRETE_P to raise it)");
  }
  if (kind != ScalarKind::iter_add) n = 2;
  if (n == 0) throw std::invalid_argument("lower_scalar: iter_add needs at least one operand");
  FpCircuitBuilder fb(p, cap);
  std::vector<FpWires> xs;
  for (std::size_t i = 0; i < n; ++i) xs.push_back(fb.input());
  switch (kind) {
    case ScalarKind::add: fb.output(fb.add(xs[0], xs[1])); break;
    case ScalarKind::mul: fb.output(fb.mul(xs[0], xs[1])); break;
    case ScalarKind::iter_add: fb.output(fb.iter_add(xs)); break;
    case ScalarKind::cmp: {
      const auto lg = fb.cmp(xs[0], xs[1]);
      fb.gates().outputs(lg);
      break;
    }
  }
  const std::string name = kind == ScalarKind::iter_add ? "iter_add(" + std::to_string(n) + ")" : to_string(kind);
  LoweredArtifact a = finish(std::move(fb), name);
  a.input_shapes.assign(n, {1, 1});
  return a;
}

/// Single macro gate; evaluation delegates to the reference operation.
inline LoweredArtifact lower_macro(MacroKind kind, int p, std::size_t n = 1) {
  const std::size_t arity = kind == MacroKind::iter_mul ? n : kind == MacroKind::div ? 2 : 1;
  if (arity == 0) throw std::invalid_argument("lower_macro: iter_mul needs at least one operand");
  FpCircuitBuilder fb(p);
  std::vector<FpWires> xs;
  for (std::size_t i = 0; i < arity; ++i) xs.push_back(fb.input());
  switch (kind) {
    case MacroKind::exp: fb.output(fb.exp(xs[0])); break;
    case MacroKind::sqrt: fb.output(fb.sqrt(xs[0])); break;
    case MacroKind::div: fb.output(fb.div(xs[0], xs[1])); break;
    case MacroKind::iter_mul: fb.output(fb.iter_mul(xs)); break;
  }
  const std::string name = kind == MacroKind::iter_mul ? "iter_mul(" + std::to_string(n) + ")" : to_string(kind);
  LoweredArtifact a = finish(std::move(fb), name);
  a.input_shapes.assign(arity, {1, 1});
  return a;
}

}  // namespace hopcirc
