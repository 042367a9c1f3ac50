#pragma once

#include "hopcirc/problems/connectivity.hpp"
#include "hopcirc/problems/s5.hpp"
#include "hopcirc/problems/tree.hpp"

#include <json.hpp>

#include <variant>

namespace hopcirc {

enum class ProblemKind { connectivity, tree_iso, s5_word };

inline const char* to_string(ProblemKind k) {
  switch (k) {
    case ProblemKind::connectivity: return "connectivity";
    case ProblemKind::tree_iso: return "tree_iso";
    case ProblemKind::s5_word: return "s5_word";
  }
  return "?";
}

inline ProblemKind parse_problem_kind(const std::string& s) {
  if (s == "connectivity") return ProblemKind::connectivity;
  if (s == "tree_iso") return ProblemKind::tree_iso;
  if (s == "s5_word" || s == "s5") return ProblemKind::s5_word;
  throw std::invalid_argument("unknown problem kind '" + s + "' (expected connectivity, tree_iso or s5_word)");
}

using ProblemPayload = std::variant<ConnectivityInstance, TreePair, std::vector<Perm5>>;

struct ProblemInstance {
  ProblemKind kind = ProblemKind::connectivity;
  ProblemPayload payload;
  bool label = false;
  std::vector<std::string> tokens;
  std::uint64_t seed = 0;
};

inline bool oracle(const ProblemPayload& p) {
  return std::visit(
      [](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ConnectivityInstance>) return oracle_connectivity(x);
        else if constexpr (std::is_same_v<T, TreePair>) return oracle_tree_iso(x.first, x.second);
        else return oracle_s5(x);
      },
      p);
}

inline std::vector<std::string> problem_tokens(const ProblemPayload& p) {
  return std::visit(
      [](const auto& x) -> std::vector<std::string> {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ConnectivityInstance>) {
          return connectivity_tokens(x);
        } else if constexpr (std::is_same_v<T, TreePair>) {
          auto t = tree_tokens(x.first);
          t.push_back("|");
          const auto u = tree_tokens(x.second);
          t.insert(t.end(), u.begin(), u.end());
          return t;
        } else {
          std::vector<std::string> t;
          for (const Perm5& f : x) t.push_back(to_token(f));
          return t;
        }
      },
      p);
}

/// Checks the payload invariants and that the stored label and tokens agree
/// with the oracle and the encoder.
inline void validate(const ProblemInstance& inst) {
  if (const auto* g = std::get_if<ConnectivityInstance>(&inst.payload)) {
    g->validate();
    if (!g->is_cycle_union()) throw std::invalid_argument("connectivity: graph is not a disjoint union of cycles");
  } else if (const auto* t = std::get_if<TreePair>(&inst.payload)) {
    t->first.validate();
    t->second.validate();
  } else {
    for (const Perm5& f : std::get<std::vector<Perm5>>(inst.payload)) {
      if (!f.valid()) throw std::invalid_argument("s5_word: invalid permutation");
    }
  }
  if (inst.label != oracle(inst.payload)) throw std::invalid_argument("instance label disagrees with the oracle");
  if (inst.tokens != problem_tokens(inst.payload)) throw std::invalid_argument("instance tokens disagree with the payload");
}

namespace detail {

inline ProblemInstance finish_instance(ProblemKind kind, ProblemPayload payload, std::uint64_t seed) {
  ProblemInstance inst{kind, std::move(payload), false, {}, seed};
  inst.label = oracle(inst.payload);
  inst.tokens = problem_tokens(inst.payload);
  validate(inst);
  return inst;
}

}  // namespace detail

inline ProblemInstance gen_connectivity(std::size_t n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  return detail::finish_instance(ProblemKind::connectivity, gen_connectivity(n, rng), seed);
}

inline ProblemInstance gen_tree_pair(std::size_t n, bool make_isomorphic, bool colored, std::uint64_t seed) {
  SplitMix64 rng(seed);
  return detail::finish_instance(ProblemKind::tree_iso, gen_tree_pair(n, make_isomorphic, colored, rng), seed);
}

inline ProblemInstance gen_s5_word(std::size_t length, bool make_identity, std::uint64_t seed) {
  SplitMix64 rng(seed);
  return detail::finish_instance(ProblemKind::s5_word, gen_s5_word(length, make_identity, rng), seed);
}

/// Seed of item `index` in a batch, so any item can be generated on its own.
inline std::uint64_t batch_seed(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 s(seed ^ (0xD1B54A32D192ED03ULL * (index + 1)));
  return s();
}

/// Generation parameters for a batch; `positive` picks the label for
/// tree_iso and s5_word (connectivity draws its own), and -1 alternates.
struct GenParams {
  ProblemKind kind = ProblemKind::connectivity;
  std::size_t size = 6;
  int positive = -1;
  bool colored = false;
};

inline ProblemInstance gen_instance(const GenParams& g, std::uint64_t seed, std::uint64_t index = 0) {
  const std::uint64_t s = batch_seed(seed, index);
  const bool want = g.positive < 0 ? index % 2 == 0 : g.positive != 0;
  switch (g.kind) {
    case ProblemKind::connectivity: return gen_connectivity(g.size, s);
    case ProblemKind::tree_iso: return gen_tree_pair(g.size, want, g.colored, s);
    case ProblemKind::s5_word: return gen_s5_word(g.size, want, s);
  }
  throw std::logic_error("gen_instance: unhandled kind");
}

// JSON form: {kind, payload, label, tokens, seed}.

inline nlohmann::json tree_to_json(const RootedTree& t) {
  return {{"root", t.root}, {"children", t.children}, {"color", t.color}, {"string", encode_tree_string(t)}};
}

inline RootedTree tree_from_json(const nlohmann::json& j) {
  RootedTree t;
  t.root = j.at("root").get<std::size_t>();
  t.children = j.at("children").get<std::vector<std::vector<std::size_t>>>();
  t.color = j.at("color").get<std::vector<int>>();
  t.validate();
  return t;
}

inline nlohmann::json to_json(const ProblemInstance& inst) {
  nlohmann::json payload;
  if (const auto* g = std::get_if<ConnectivityInstance>(&inst.payload)) {
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [a, b] : g->edges) edges.push_back({a, b});
    payload = {{"n", g->n}, {"edges", edges}, {"query", {g->u, g->v}}};
  } else if (const auto* t = std::get_if<TreePair>(&inst.payload)) {
    payload = {{"first", tree_to_json(t->first)}, {"second", tree_to_json(t->second)}};
  } else {
    nlohmann::json word = nlohmann::json::array();
    for (const Perm5& f : std::get<std::vector<Perm5>>(inst.payload)) word.push_back(to_token(f));
    payload = {{"word", word}};
  }
  return {{"kind", to_string(inst.kind)},
          {"payload", payload},
          {"label", inst.label},
          {"tokens", inst.tokens},
          {"seed", inst.seed}};
}

/// Parses and validates; throws on malformed input or a wrong label.
inline ProblemInstance instance_from_json(const nlohmann::json& j) {
  ProblemInstance inst;
  inst.kind = parse_problem_kind(j.at("kind").get<std::string>());
  const auto& p = j.at("payload");
  switch (inst.kind) {
    case ProblemKind::connectivity: {
      ConnectivityInstance g;
      g.n = p.at("n").get<std::size_t>();
      for (const auto& e : p.at("edges")) g.edges.emplace_back(e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>());
      g.u = p.at("query").at(0).get<std::size_t>();
      g.v = p.at("query").at(1).get<std::size_t>();
      inst.payload = g;
      break;
    }
    case ProblemKind::tree_iso:
      inst.payload = TreePair{tree_from_json(p.at("first")), tree_from_json(p.at("second"))};
      break;
    case ProblemKind::s5_word: {
      std::vector<Perm5> w;
      for (const auto& f : p.at("word")) w.push_back(parse_perm5(f.get<std::string>()));
      inst.payload = w;
      break;
    }
  }
  inst.label = j.at("label").get<bool>();
  inst.tokens = j.contains("tokens") ? j.at("tokens").get<std::vector<std::string>>() : problem_tokens(inst.payload);
  inst.seed = j.value("seed", std::uint64_t{0});
  validate(inst);
  return inst;
}

}  // namespace hopcirc
