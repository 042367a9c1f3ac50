#pragma once

#include "hopcirc/circuit/circuit.hpp"

#include <istream>
#include <ostream>
#include <sstream>

namespace hopcirc {

// Text netlist, one record per line:
//   hopcirc-netlist 1
//   width <bits>
//   region <id> <parent> <opaque> <charge> <label...>
//   macro <id> <tag> <p> <arity>
//   <id> <kind> <fan-in wires...> [@r<region>]
//   inputs <gate ids...>
//   outputs <wires...>
// Wires print as <gate> or <gate>.<bit>; kinds are input, const0, const1,
// not, and, or, maj and macro:<id>. Charges use the depth-expression syntax
// without spaces.

namespace detail {

inline std::string wire_token(const Wire& w) {
  return w.bit ? std::to_string(w.gate) + "." + std::to_string(w.bit) : std::to_string(w.gate);
}

inline Wire parse_wire(const std::string& tok) {
  std::size_t used = 0;
  Wire w;
  w.gate = static_cast<std::uint32_t>(std::stoul(tok, &used));
  if (used < tok.size()) {
    if (tok[used] != '.') throw std::invalid_argument("bad wire '" + tok + "'");
    const std::string rest = tok.substr(used + 1);
    w.bit = static_cast<std::uint32_t>(std::stoul(rest, &used));
    if (used != rest.size()) throw std::invalid_argument("bad wire '" + tok + "'");
  }
  return w;
}

inline std::string compact(std::string s) {
  std::erase(s, ' ');
  return s;
}

}  // namespace detail

inline void write_netlist(std::ostream& os, const Circuit& c) {
  os << "hopcirc-netlist 1\n";
  os << "width " << c.width << "\n";
  for (std::size_t r = 0; r < c.regions.size(); ++r) {
    const Region& reg = c.regions[r];
    os << "region " << r << ' ' << reg.parent << ' ' << (reg.opaque ? 1 : 0) << ' '
       << detail::compact(to_string(reg.charge));
    if (!reg.label.empty()) os << ' ' << reg.label;
    os << '\n';
  }
  for (std::size_t m = 0; m < c.macros.size(); ++m) {
    const MacroInfo& mi = c.macros[m];
    os << "macro " << m << ' ' << to_string(mi.tag) << ' ' << mi.p << ' ' << mi.arity << '\n';
  }
  for (std::uint32_t g = 0; g < c.gates.size(); ++g) {
    const Gate& gate = c.gates[g];
    os << g << ' ';
    switch (gate.kind) {
      case GateKind::constant: os << (gate.value ? "const1" : "const0"); break;
      case GateKind::macro: os << "macro:" << gate.macro; break;
      default: os << to_string(gate.kind);
    }
    for (const Wire& w : c.fanin(g)) os << ' ' << detail::wire_token(w);
    if (gate.region >= 0) os << " @r" << gate.region;
    os << '\n';
  }
  os << "inputs";
  for (auto g : c.inputs) os << ' ' << g;
  os << "\noutputs";
  for (const Wire& w : c.outputs) os << ' ' << detail::wire_token(w);
  os << '\n';
}

inline std::string to_netlist(const Circuit& c) {
  std::ostringstream os;
  write_netlist(os, c);
  return os.str();
}

/// Inverse of write_netlist. Throws std::invalid_argument on malformed text;
/// the result is not validated.
inline Circuit read_netlist(std::istream& is) {
  Circuit c;
  std::string line;
  std::size_t lineno = 0;
  const auto fail = [&](const std::string& why) {
    throw std::invalid_argument("netlist line " + std::to_string(lineno) + ": " + why);
  };
  if (!std::getline(is, line) || line != "hopcirc-netlist 1") {
    lineno = 1;
    fail("missing 'hopcirc-netlist 1' header");
  }
  lineno = 1;
  bool saw_inputs = false, saw_outputs = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string head;
    ls >> head;
    try {
      if (head == "width") {
        if (!(ls >> c.width)) fail("bad width");
      } else if (head == "region") {
        std::size_t id;
        int opaque;
        std::string charge;
        Region r;
        if (!(ls >> id >> r.parent >> opaque >> charge) || id != c.regions.size()) fail("bad region record");
        r.opaque = opaque != 0;
        r.charge = parse_depth(charge);
        std::getline(ls >> std::ws, r.label);
        c.regions.push_back(std::move(r));
      } else if (head == "macro") {
        std::size_t id;
        std::string tag;
        MacroInfo m{};
        if (!(ls >> id >> tag >> m.p >> m.arity) || id != c.macros.size()) fail("bad macro record");
        m.tag = parse_macro_tag(tag);
        c.macros.push_back(m);
      } else if (head == "inputs") {
        saw_inputs = true;
        for (std::uint32_t g; ls >> g;) c.inputs.push_back(g);
      } else if (head == "outputs") {
        saw_outputs = true;
        for (std::string tok; ls >> tok;) c.outputs.push_back(detail::parse_wire(tok));
      } else {
        std::size_t used = 0;
        const unsigned long id = std::stoul(head, &used);
        if (used != head.size() || id != c.gates.size()) fail("gate ids must be consecutive");
        std::string kind;
        if (!(ls >> kind)) fail("missing gate kind");
        Gate gate;
        if (kind == "input") gate.kind = GateKind::input;
        else if (kind == "const0" || kind == "const1") {
          gate.kind = GateKind::constant;
          gate.value = kind == "const1";
        } else if (kind == "not") gate.kind = GateKind::not_gate;
        else if (kind == "and") gate.kind = GateKind::and_gate;
        else if (kind == "or") gate.kind = GateKind::or_gate;
        else if (kind == "maj") gate.kind = GateKind::majority;
        else if (kind.rfind("macro:", 0) == 0) {
          gate.kind = GateKind::macro;
          gate.macro = std::stoi(kind.substr(6));
        } else fail("unknown gate kind '" + kind + "'");
        gate.first = static_cast<std::uint32_t>(c.fanins.size());
        for (std::string tok; ls >> tok;) {
          if (tok.rfind("@r", 0) == 0) {
            gate.region = std::stoi(tok.substr(2));
          } else {
            c.fanins.push_back(detail::parse_wire(tok));
            ++gate.count;
          }
        }
        c.gates.push_back(gate);
      }
    } catch (const std::invalid_argument& e) {
      const std::string what = e.what();
      if (what.rfind("netlist line", 0) == 0) throw;
      fail(what);
    } catch (const std::out_of_range&) {
      fail("number out of range");
    }
  }
  if (!saw_inputs || !saw_outputs) fail("missing inputs/outputs record");
  return c;
}

inline Circuit parse_netlist(const std::string& text) {
  std::istringstream is(text);
  return read_netlist(is);
}

}  // namespace hopcirc
