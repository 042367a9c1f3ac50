#include "hopcirc/problems.hpp"

#include "oracles/problem_oracle.hpp"

#include <gtest/gtest.h>

#include <functional>
#include <map>
#include <set>

using namespace hopcirc;

namespace {

ConnectivityInstance two_triangles(std::size_t u, std::size_t v) {
  return {6, {{1, 2}, {2, 3}, {3, 1}, {4, 5}, {5, 6}, {6, 4}}, u, v};
}

}  // namespace

TEST(Connectivity, Examples) {
  EXPECT_TRUE(oracle_connectivity(two_triangles(1, 3)));
  EXPECT_FALSE(oracle_connectivity(two_triangles(1, 4)));
  EXPECT_TRUE(oracle_connectivity(two_triangles(5, 5)));
  const ConnectivityInstance ring{5, {{1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 1}}, 1, 1};
  for (std::size_t u = 1; u <= 5; ++u) {
    for (std::size_t v = 1; v <= 5; ++v) {
      auto g = ring;
      g.u = u;
      g.v = v;
      EXPECT_TRUE(oracle_connectivity(g));
    }
  }
  EXPECT_TRUE(two_triangles(1, 2).is_cycle_union());
  EXPECT_THROW(gen_connectivity(2, std::uint64_t{1}), std::invalid_argument);
}

TEST(Connectivity, GeneratorDeterministicAndValid) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto a = gen_connectivity(12, seed);
    const auto b = gen_connectivity(12, seed);
    EXPECT_EQ(to_json(a), to_json(b));
    const auto& g = std::get<ConnectivityInstance>(a.payload);
    EXPECT_TRUE(g.is_cycle_union());
    EXPECT_EQ(g.edges.size(), 12u);
  }
  EXPECT_NE(to_json(gen_connectivity(12, std::uint64_t{1})), to_json(gen_connectivity(12, std::uint64_t{2})));
}

TEST(Connectivity, UnionFindMatchesBfs) {
  int positives = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto inst = gen_connectivity(3 + seed % 30, seed);
    const auto& g = std::get<ConnectivityInstance>(inst.payload);
    ASSERT_EQ(oracle_connectivity(g), oracle::bfs_connected(g)) << seed;
    ASSERT_EQ(inst.label, oracle::bfs_connected(g));
    ASSERT_EQ(connected_bfs(g), oracle::bfs_connected(g));
    positives += inst.label;
  }
  // Roughly balanced labels; single-cycle graphs push the rate above 1/2.
  EXPECT_GT(positives, 450);
  EXPECT_LT(positives, 800);
}

TEST(TreeIso, Examples) {
  EXPECT_TRUE(oracle_tree_iso(RootedTree::single(), RootedTree::single()));
  const auto cherry = RootedTree::from_parents({0, 0, 0});
  const auto chain = RootedTree::from_parents({0, 0, 1});
  EXPECT_FALSE(oracle_tree_iso(cherry, chain));
  EXPECT_TRUE(oracle_tree_iso(chain, chain));
  EXPECT_FALSE(oracle_tree_iso(chain, RootedTree::from_parents({0, 0})));
  EXPECT_FALSE(oracle_tree_iso(RootedTree::from_parents({0, 0}, {1, 2}), RootedTree::from_parents({0, 0}, {2, 1})));
  const auto inst = gen_tree_pair(1, true, false, std::uint64_t{9});
  EXPECT_TRUE(inst.label);
  EXPECT_THROW(gen_tree_pair(2, false, false, std::uint64_t{9}), std::invalid_argument);
  EXPECT_THROW(gen_tree_pair(1, false, true, std::uint64_t{9}), std::invalid_argument);
}

TEST(TreeIso, StringEncoding) {
  EXPECT_EQ(encode_tree_string(RootedTree::single()), "(1)");
  EXPECT_EQ(encode_tree_string(RootedTree::from_parents({0, 0, 0}, {1, 2, 3})), "(1(2)(3))");
  EXPECT_EQ(tree_tokens(RootedTree::from_parents({0, 0}, {1, 2})), (std::vector<std::string>{"(", "1", "(", "2", ")", ")"}));
  SplitMix64 rng(61);
  for (int t = 0; t < 1000; ++t) {
    const RootedTree tree = scramble(random_tree(1 + rng.below(20), rng.coin(), rng), rng);
    const std::string s = encode_tree_string(tree);
    EXPECT_EQ(decode_tree_string(s), oracle::preorder_relabel(tree)) << s;
  }
  for (const char* bad : {"", "(", "()", "(1))", "(1)(2)", "(1x)", "(0)"}) {
    EXPECT_THROW(decode_tree_string(bad), std::invalid_argument) << bad;
  }
}

TEST(TreeIso, AhuMatchesBruteForceExhaustive) {
  // Rooted unlabeled trees per node count.
  const std::vector<std::size_t> expected_classes{1, 1, 2, 4, 9, 20, 48, 115};
  for (std::size_t n = 1; n <= 8; ++n) {
    std::vector<RootedTree> reps;
    for (const RootedTree& t : oracle::all_recursive_trees(n)) {
      bool placed = false;
      for (const RootedTree& r : reps) {
        const bool iso = oracle::brute_force_iso(t, r);
        ASSERT_EQ(oracle_tree_iso(t, r), iso) << encode_tree_string(t) << " vs " << encode_tree_string(r);
        placed = placed || iso;
      }
      if (!placed) reps.push_back(t);
    }
    EXPECT_EQ(reps.size(), expected_classes[n - 1]) << n;
    for (const auto& a : reps) {
      for (const auto& b : reps) ASSERT_EQ(oracle_tree_iso(a, b), oracle::brute_force_iso(a, b));
    }
  }
}

TEST(TreeIso, ColoredRandomAgainstBruteForce) {
  SplitMix64 rng(62);
  for (int t = 0; t < 2000; ++t) {
    const std::size_t n = 1 + rng.below(9);
    const bool colored = rng.coin();
    const RootedTree a = random_tree(n, colored, rng);
    const RootedTree b = rng.coin() ? scramble(a, rng) : random_tree(n, colored, rng);
    ASSERT_EQ(oracle_tree_iso(a, b), oracle::brute_force_iso(a, b)) << encode_tree_string(a) << " " << encode_tree_string(b);
    ASSERT_EQ(tree_iso_brute_force(a, b), oracle::brute_force_iso(a, b));
  }
}

TEST(TreeIso, GeneratorLabels) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const std::size_t n = 3 + seed % 8;
    const bool colored = seed % 3 == 0;
    const auto yes = gen_tree_pair(n, true, colored, seed);
    const auto no = gen_tree_pair(n, false, colored, seed);
    const auto& py = std::get<TreePair>(yes.payload);
    const auto& pn = std::get<TreePair>(no.payload);
    EXPECT_TRUE(yes.label);
    EXPECT_FALSE(no.label);
    EXPECT_TRUE(oracle::brute_force_iso(py.first, py.second));
    EXPECT_FALSE(oracle::brute_force_iso(pn.first, pn.second));
    EXPECT_EQ(pn.second.size(), n);
    EXPECT_EQ(to_json(yes), to_json(gen_tree_pair(n, true, colored, seed)));
  }
}

TEST(S5, Examples) {
  EXPECT_TRUE(oracle_s5({Perm5::identity(), Perm5::identity(), Perm5::identity()}));
  EXPECT_TRUE(oracle_s5({transposition(1, 2), transposition(1, 2)}));
  EXPECT_FALSE(oracle_s5({transposition(1, 2)}));
  // (1 2) then (2 3): 1 -> 2 -> 3.
  EXPECT_EQ(compose_word({transposition(1, 2), transposition(2, 3)})(1), 3);
  EXPECT_EQ(s5_elements().size(), 120u);
  std::set<std::string> tokens;
  for (const auto& f : s5_elements()) tokens.insert(to_token(f));
  EXPECT_EQ(tokens.size(), 120u);
  for (std::size_t i = 0; i < 120; ++i) EXPECT_EQ(s5_index(s5_elements()[i]), i);
  EXPECT_EQ(parse_perm5("21345"), transposition(1, 2));
  for (const char* bad : {"1234", "11345", "62345"}) EXPECT_THROW(parse_perm5(bad), std::invalid_argument);
}

TEST(S5, FoldsAgreeAndGeneratorLabels) {
  SplitMix64 rng(63);
  for (int t = 0; t < 1000; ++t) {
    std::vector<Perm5> w;
    for (std::size_t i = 0, n = 1 + rng.below(40); i < n; ++i) w.push_back(random_perm5(rng));
    ASSERT_EQ(compose_word(w), oracle::balanced_fold(w, 0, w.size()));
    ASSERT_EQ(oracle_s5(w), oracle::word_is_identity(w));
    ASSERT_EQ(compose_word_balanced(w, 0, w.size()), compose_word(w));
  }
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const std::size_t len = 1 + seed % 17;
    const auto yes = gen_s5_word(len, true, seed);
    const auto no = gen_s5_word(len, false, seed);
    EXPECT_TRUE(yes.label);
    EXPECT_FALSE(no.label);
    EXPECT_EQ(std::get<std::vector<Perm5>>(yes.payload).size(), len);
    EXPECT_EQ(std::get<std::vector<Perm5>>(no.payload).size(), len);
  }
}

TEST(Instances, JsonRoundTripAndValidation) {
  for (ProblemKind k : {ProblemKind::connectivity, ProblemKind::tree_iso, ProblemKind::s5_word}) {
    const GenParams g{k, 7, -1, k == ProblemKind::tree_iso};
    for (std::uint64_t i = 0; i < 20; ++i) {
      const auto inst = gen_instance(g, 77, i);
      const auto j = to_json(inst);
      const auto back = instance_from_json(nlohmann::json::parse(j.dump()));
      EXPECT_EQ(to_json(back), j);
      EXPECT_EQ(to_json(gen_instance(g, 77, i)), j);
    }
  }
  auto j = to_json(gen_s5_word(4, true, std::uint64_t{3}));
  j["label"] = false;
  EXPECT_THROW(instance_from_json(j), std::invalid_argument);
  auto c = to_json(gen_connectivity(6, std::uint64_t{3}));
  c["payload"]["edges"].erase(0);
  EXPECT_THROW(instance_from_json(c), std::invalid_argument);
}
