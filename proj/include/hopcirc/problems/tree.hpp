#pragma once

#include "hopcirc/util/rng.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace hopcirc {

/// Rooted tree with ordered children and a color per node (1-based colors).
struct RootedTree {
  std::size_t root = 0;
  std::vector<std::vector<std::size_t>> children;
  std::vector<int> color;

  std::size_t size() const { return children.size(); }
  bool operator==(const RootedTree&) const = default;

  static RootedTree single(int color = 1) { return {0, {{}}, {color}}; }

  std::vector<std::size_t> parents() const {
    std::vector<std::size_t> p(size(), size());
    for (std::size_t v = 0; v < size(); ++v) {
      for (std::size_t c : children[v]) p[c] = v;
    }
    return p;
  }

  /// Connected, acyclic, every non-root node has exactly one parent, colors
  /// in [1, size].
  void validate() const {
    const std::size_t n = size();
    if (n == 0) throw std::invalid_argument("tree: empty");
    if (color.size() != n) throw std::invalid_argument("tree: color list size mismatch");
    if (root >= n) throw std::invalid_argument("tree: root out of range");
    std::vector<int> indeg(n, 0);
    for (const auto& cs : children) {
      for (std::size_t c : cs) {
        if (c >= n) throw std::invalid_argument("tree: child out of range");
        ++indeg[c];
      }
    }
    for (std::size_t v = 0; v < n; ++v) {
      if (indeg[v] != (v == root ? 0 : 1)) throw std::invalid_argument("tree: node " + std::to_string(v) + " has the wrong number of parents");
      if (color[v] < 1 || static_cast<std::size_t>(color[v]) > n) throw std::invalid_argument("tree: color out of range");
    }
    std::vector<std::size_t> stack{root};
    std::size_t seen = 0;
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      ++seen;
      stack.insert(stack.end(), children[v].begin(), children[v].end());
    }
    if (seen != n) throw std::invalid_argument("tree: not connected to the root");
  }

  /// Builds the tree with parent[v] (root: parent == v or size()); children
  /// in increasing id order.
  static RootedTree from_parents(const std::vector<std::size_t>& parent, std::vector<int> colors = {}) {
    RootedTree t;
    const std::size_t n = parent.size();
    t.children.resize(n);
    t.color = colors.empty() ? std::vector<int>(n, 1) : std::move(colors);
    bool have_root = false;
    for (std::size_t v = 0; v < n; ++v) {
      if (parent[v] == v || parent[v] >= n) {
        if (have_root) throw std::invalid_argument("tree: more than one root");
        t.root = v;
        have_root = true;
      } else {
        t.children[parent[v]].push_back(v);
      }
    }
    t.validate();
    return t;
  }
};

namespace detail {

inline void encode_tree(const RootedTree& t, std::size_t v, std::string& out) {
  out += '(';
  out += std::to_string(t.color[v]);
  for (std::size_t c : t.children[v]) encode_tree(t, c, out);
  out += ')';
}

}  // namespace detail

/// Preorder balanced parentheses, `(c child_1 ... child_k)`, children in
/// stored order.
inline std::string encode_tree_string(const RootedTree& t) {
  t.validate();
  std::string out;
  detail::encode_tree(t, t.root, out);
  return out;
}

/// Inverse of encode_tree_string; nodes are numbered in preorder.
inline RootedTree decode_tree_string(const std::string& s) {
  RootedTree t;
  std::vector<std::size_t> open;
  std::size_t i = 0;
  const auto fail = [&](const std::string& why) {
    throw std::invalid_argument("tree string at offset " + std::to_string(i) + ": " + why);
  };
  while (i < s.size()) {
    if (s[i] == '(') {
      ++i;
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      if (j == i) fail("expected a color");
      const std::size_t v = t.size();
      t.children.emplace_back();
      t.color.push_back(std::stoi(s.substr(i, j - i)));
      if (open.empty()) {
        if (v != 0) fail("more than one root");
      } else {
        t.children[open.back()].push_back(v);
      }
      open.push_back(v);
      i = j;
    } else if (s[i] == ')') {
      if (open.empty()) fail("unbalanced ')'");
      open.pop_back();
      ++i;
    } else {
      fail("unexpected character");
    }
  }
  if (!open.empty() || t.size() == 0) fail("unbalanced '('");
  t.validate();
  return t;
}

/// Tokens: '(' , color, ')' as separate symbols.
inline std::vector<std::string> tree_tokens(const RootedTree& t) {
  std::vector<std::string> out;
  const std::string s = encode_tree_string(t);
  for (std::size_t i = 0; i < s.size();) {
    if (s[i] == '(' || s[i] == ')') {
      out.emplace_back(1, s[i++]);
    } else {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      out.push_back(s.substr(i, j - i));
      i = j;
    }
  }
  return out;
}

/// AHU canonical form: a node's code is its color followed by its children's
/// codes in sorted order.
inline std::string canonical_form(const RootedTree& t) {
  t.validate();
  std::vector<std::string> code(t.size());
  std::vector<std::size_t> order{t.root};
  for (std::size_t k = 0; k < order.size(); ++k) {
    for (std::size_t c : t.children[order[k]]) order.push_back(c);
  }
  for (std::size_t k = order.size(); k-- > 0;) {
    const std::size_t v = order[k];
    std::vector<std::string> kids;
    for (std::size_t c : t.children[v]) kids.push_back(std::move(code[c]));
    std::sort(kids.begin(), kids.end());
    std::string s = "(" + std::to_string(t.color[v]);
    for (const auto& x : kids) s += x;
    s += ")";
    code[v] = std::move(s);
  }
  return code[t.root];
}

inline bool oracle_tree_iso(const RootedTree& a, const RootedTree& b) {
  return a.size() == b.size() && canonical_form(a) == canonical_form(b);
}

/// Search over root-preserving bijections, each node mapped to an unused
/// child of its parent's image with the same color and child count; the
/// cross-check for oracle_tree_iso (exponential in the worst case).
inline bool tree_iso_brute_force(const RootedTree& a, const RootedTree& b) {
  if (a.size() != b.size()) return false;
  std::vector<std::size_t> order{a.root};
  for (std::size_t k = 0; k < order.size(); ++k) {
    for (std::size_t c : a.children[order[k]]) order.push_back(c);
  }
  const auto pa = a.parents();
  std::vector<std::size_t> image(a.size(), a.size());
  std::vector<std::uint8_t> used(b.size(), 0);
  const auto search = [&](auto& self, std::size_t k) -> bool {
    if (k == order.size()) return true;
    const std::size_t x = order[k];
    const std::vector<std::size_t> candidates =
        k == 0 ? std::vector<std::size_t>{b.root} : b.children[image[pa[x]]];
    for (std::size_t y : candidates) {
      if (used[y] || a.color[x] != b.color[y] || a.children[x].size() != b.children[y].size()) continue;
      used[y] = 1;
      image[x] = y;
      if (self(self, k + 1)) return true;
      used[y] = 0;
    }
    return false;
  };
  return search(search, 0);
}

/// Random recursive tree: node v > 0 hangs under a uniform earlier node;
/// colors uniform in [1, n] when `colored`, else all 1.
inline RootedTree random_tree(std::size_t n, bool colored, SplitMix64& rng) {
  if (n == 0) throw std::invalid_argument("random_tree: need at least one node");
  std::vector<std::size_t> parent(n);
  std::vector<int> colors(n, 1);
  parent[0] = 0;
  for (std::size_t v = 1; v < n; ++v) parent[v] = rng.below(v);
  if (colored) {
    for (auto& c : colors) c = static_cast<int>(rng.range(1, static_cast<std::int64_t>(n)));
  }
  return RootedTree::from_parents(parent, colors);
}

/// Same tree under a random relabeling of node ids and random child orders.
inline RootedTree scramble(const RootedTree& t, SplitMix64& rng) {
  std::vector<std::size_t> perm(t.size());
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);
  RootedTree out;
  out.root = perm[t.root];
  out.children.resize(t.size());
  out.color.resize(t.size());
  for (std::size_t v = 0; v < t.size(); ++v) {
    out.color[perm[v]] = t.color[v];
    auto& cs = out.children[perm[v]];
    for (std::size_t c : t.children[v]) cs.push_back(perm[c]);
    rng.shuffle(cs);
  }
  return out;
}

struct TreePair {
  RootedTree first;
  RootedTree second;
};

/// Whether some tree of n nodes differs from every other in shape or colors.
inline bool non_isomorphic_pair_exists(std::size_t n, bool colored) { return colored ? n >= 2 : n >= 3; }

/// Isomorphic pairs scramble one random tree. Non-isomorphic pairs move one
/// subtree (or, for colored trees, sometimes recolor one node) and retry
/// until the canonical forms differ.
inline TreePair gen_tree_pair(std::size_t n, bool make_isomorphic, bool colored, SplitMix64& rng) {
  const RootedTree a = random_tree(n, colored, rng);
  if (make_isomorphic) return {a, scramble(a, rng)};
  if (!non_isomorphic_pair_exists(n, colored)) {
    throw std::invalid_argument("gen_tree_pair: every " + std::string(colored ? "colored" : "uncolored") +
                                " tree with " + std::to_string(n) + " node(s) is isomorphic to every other");
  }
  const std::string ca = canonical_form(a);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    RootedTree b = a;
    if (colored && (n < 3 || rng.coin())) {
      const std::size_t v = rng.below(n);
      b.color[v] = static_cast<int>(rng.range(1, static_cast<std::int64_t>(n)));
    } else {
      // Detach a non-root node and hang it under a node outside its subtree.
      std::size_t v = rng.below(n - 1);
      if (v >= b.root) ++v;
      std::vector<std::uint8_t> inside(n, 0);
      std::vector<std::size_t> stack{v};
      while (!stack.empty()) {
        const std::size_t x = stack.back();
        stack.pop_back();
        inside[x] = 1;
        stack.insert(stack.end(), b.children[x].begin(), b.children[x].end());
      }
      std::vector<std::size_t> targets;
      for (std::size_t x = 0; x < n; ++x) {
        if (!inside[x]) targets.push_back(x);
      }
      const std::size_t to = targets[rng.below(targets.size())];
      for (auto& cs : b.children) std::erase(cs, v);
      b.children[to].push_back(v);
    }
    if (canonical_form(b) != ca) return {a, scramble(b, rng)};
  }
  throw std::runtime_error("gen_tree_pair: no non-isomorphic edit found");
}

}  // namespace hopcirc
