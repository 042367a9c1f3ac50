#pragma once

#include "hopcirc/circuit/circuit.hpp"

#include <initializer_list>

namespace hopcirc {

/// Append-only circuit construction. Gates get the innermost open region;
/// trivially decided logic gates fold to constants or pass-through wires
/// (buffer() never folds).
class CircuitBuilder {
 public:
  explicit CircuitBuilder(std::size_t width = 0) { c_.width = width; }

  Wire input() {
    const Wire w = push(GateKind::input, {}, false, -1);
    c_.inputs.push_back(w.gate);
    return w;
  }
  std::vector<Wire> inputs(std::size_t n) {
    std::vector<Wire> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(input());
    return out;
  }

  Wire constant(bool v) {
    auto& cached = v ? one_ : zero_;
    if (!cached) {
      Gate g;
      g.kind = GateKind::constant;
      g.value = v;
      g.first = static_cast<std::uint32_t>(c_.fanins.size());
      cached = Wire{static_cast<std::uint32_t>(c_.gates.size()), 0};
      c_.gates.push_back(g);
    }
    return *cached;
  }
  Wire zero() { return constant(false); }
  Wire one() { return constant(true); }

  std::optional<bool> constant_value(Wire w) const {
    const Gate& g = c_.gates[w.gate];
    if (g.kind == GateKind::constant) return g.value;
    return std::nullopt;
  }

  Wire not_(Wire a) {
    if (auto v = constant_value(a)) return constant(!*v);
    return push(GateKind::not_gate, {&a, 1});
  }

  Wire and_(std::span<const Wire> xs) { return and_or(xs, true); }
  Wire or_(std::span<const Wire> xs) { return and_or(xs, false); }
  Wire and_(std::initializer_list<Wire> xs) { return and_({xs.begin(), xs.size()}); }
  Wire or_(std::initializer_list<Wire> xs) { return or_({xs.begin(), xs.size()}); }

  /// Strict majority: 1 iff ones >= floor(n/2) + 1.
  Wire majority(std::span<const Wire> xs) {
    if (xs.empty()) throw std::invalid_argument("majority: empty fan-in");
    const std::size_t need = xs.size() / 2 + 1;
    std::size_t ones = 0, free = 0;
    for (const Wire& w : xs) {
      if (auto v = constant_value(w)) ones += *v;
      else ++free;
    }
    if (ones >= need) return one();
    if (ones + free < need) return zero();
    return push(GateKind::majority, xs);
  }
  Wire majority(std::initializer_list<Wire> xs) { return majority({xs.begin(), xs.size()}); }

  /// A 1-input AND that is never folded away.
  Wire buffer(Wire a) { return push(GateKind::and_gate, {&a, 1}); }

  std::vector<Wire> macro(const MacroInfo& m, std::span<const Wire> in) {
    if (in.size() != m.in_width()) throw std::invalid_argument("macro: input width mismatch");
    c_.macros.push_back(m);
    const Wire w = push(GateKind::macro, in, false, static_cast<std::int32_t>(c_.macros.size() - 1));
    std::vector<Wire> out;
    for (std::uint32_t b = 0; b < m.out_width(); ++b) out.push_back({w.gate, b});
    return out;
  }

  std::int32_t open_region(std::string label, DepthExpr charge, bool opaque = false) {
    Region r;
    r.parent = current_region();
    r.opaque = opaque;
    r.charge = charge;
    r.label = std::move(label);
    c_.regions.push_back(std::move(r));
    stack_.push_back(static_cast<std::int32_t>(c_.regions.size() - 1));
    return stack_.back();
  }
  void close_region() {
    if (stack_.empty()) throw std::logic_error("close_region: no open region");
    stack_.pop_back();
  }
  std::int32_t current_region() const { return stack_.empty() ? -1 : stack_.back(); }

  class Scope {
   public:
    Scope(CircuitBuilder& b, std::string label, DepthExpr charge, bool opaque = false) : b_(b) {
      b_.open_region(std::move(label), charge, opaque);
    }
    ~Scope() { b_.close_region(); }
    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;

   private:
    CircuitBuilder& b_;
  };

  void output(Wire w) { c_.outputs.push_back(w); }
  void outputs(std::span<const Wire> ws) { c_.outputs.insert(c_.outputs.end(), ws.begin(), ws.end()); }

  std::size_t size() const { return c_.gates.size(); }
  const Circuit& peek() const { return c_; }

  Circuit seal() && {
    if (!stack_.empty()) throw std::logic_error("seal: unclosed region");
    return std::move(c_);
  }

 private:
  Wire push(GateKind kind, std::span<const Wire> ins, bool value = false, std::int32_t macro = -1) {
    Gate g;
    g.kind = kind;
    g.value = value;
    g.first = static_cast<std::uint32_t>(c_.fanins.size());
    g.count = static_cast<std::uint32_t>(ins.size());
    g.region = kind == GateKind::input ? -1 : current_region();
    g.macro = macro;
    c_.fanins.insert(c_.fanins.end(), ins.begin(), ins.end());
    c_.gates.push_back(g);
    return {static_cast<std::uint32_t>(c_.gates.size() - 1), 0};
  }

  Wire and_or(std::span<const Wire> xs, bool is_and) {
    // AND: a 0 decides, 1s drop out; OR symmetrically.
    std::vector<Wire> keep;
    for (const Wire& w : xs) {
      if (auto v = constant_value(w)) {
        if (*v != is_and) return constant(!is_and);
      } else if (std::find(keep.begin(), keep.end(), w) == keep.end()) {
        keep.push_back(w);
      }
    }
    if (keep.empty()) return constant(is_and);
    if (keep.size() == 1) return keep[0];
    return push(is_and ? GateKind::and_gate : GateKind::or_gate, keep);
  }

  Circuit c_;
  std::vector<std::int32_t> stack_;
  std::optional<Wire> zero_, one_;
};

}  // namespace hopcirc
