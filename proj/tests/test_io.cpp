#include "hopcirc/io/json.hpp"
#include "hopcirc/lowering.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

using namespace hopcirc;
using hopcirc::io::json;

namespace {

ConstructConfig config(Construct c, std::size_t n, std::size_t d, std::size_t m, int p) {
  ConstructConfig cfg;
  cfg.construct = c;
  cfg.n = n;
  cfg.d = d;
  cfg.m = m;
  cfg.p = p;
  return cfg;
}

bool same_component(const Component& a, const Component& b) {
  if (a.index() != b.index()) return false;
  const auto* fa = std::get_if<FnnParams>(&a);
  if (!fa) return true;
  const auto& fb = std::get<FnnParams>(b);
  return fa->W_1 == fb.W_1 && fa->W_2 == fb.W_2 && fa->b_1 == fb.b_1 && fa->b_2 == fb.b_2;
}

}  // namespace

TEST(Json, FpValueForms) {
  const int p = 5;
  EXPECT_EQ(io::fp_from_json(json::array({17, -3}), p), make_fp(17, -3, p));
  EXPECT_EQ(io::fp_from_json(json(0.75), p), from_double(0.75, p));
  const FpNum x = from_double(-2.5, p);
  EXPECT_EQ(io::fp_from_json(json(to_string(x)), p), x);
  EXPECT_EQ(io::fp_from_json(io::fp_to_json(x), p), x);
  EXPECT_THROW(io::fp_from_json(json::array({1}), p), std::invalid_argument);
  EXPECT_THROW(io::fp_from_json(json(true), p), std::invalid_argument);
  EXPECT_THROW(io::fp_from_json(json(to_string(from_double(1.0, 7))), p), std::invalid_argument);
}

TEST(Json, MatrixRoundTripAndErrors) {
  SplitMix64 rng(3);
  const FpMatrix a = random_matrix(rng, 3, 4, 6);
  EXPECT_EQ(io::matrix_from_json(io::matrix_to_json(a)), a);
  // Text round trip as well, not only the in-memory tree.
  EXPECT_EQ(io::matrix_from_json(json::parse(io::matrix_to_json(a).dump())), a);

  json bad = io::matrix_to_json(a);
  bad["entries"].erase(0);
  EXPECT_THROW(io::matrix_from_json(bad), std::invalid_argument);
  json nop = {{"rows", 1}, {"cols", 1}, {"entries", {0.5}}};
  EXPECT_THROW(io::matrix_from_json(nop), std::invalid_argument);
  EXPECT_EQ(io::matrix_from_json(nop, 4)(0, 0), from_double(0.5, 4));
}

TEST(Json, NetworksRoundTrip) {
  SplitMix64 rng(11);
  const NetworkSpec mhn = random_mhn(rng, 2, 3, 2, 6, Normalization::softmax, ComponentKind::fnn);
  const NetworkSpec mhn2 = io::network_from_json<HopfieldLayerParams>(io::network_to_json(mhn));
  ASSERT_EQ(mhn2.layers.size(), mhn.layers.size());
  for (std::size_t i = 0; i < mhn.layers.size(); ++i) {
    EXPECT_EQ(mhn2.layers[i].W_Q, mhn.layers[i].W_Q);
    EXPECT_EQ(mhn2.layers[i].W_K, mhn.layers[i].W_K);
    EXPECT_EQ(mhn2.layers[i].W_V_tilde, mhn.layers[i].W_V_tilde);
    EXPECT_EQ(mhn2.layers[i].beta, mhn.layers[i].beta);
    EXPECT_EQ(mhn2.layers[i].normalization, mhn.layers[i].normalization);
    EXPECT_EQ(mhn2.stored_patterns[i], mhn.stored_patterns[i]);
  }
  for (std::size_t i = 0; i < mhn.components.size(); ++i) {
    EXPECT_TRUE(same_component(mhn2.components[i], mhn.components[i]));
  }
  const FpMatrix R = random_matrix(rng, 2, 3, 6);
  EXPECT_EQ(mhn_forward(R, mhn2), mhn_forward(R, mhn));

  const KernelNetworkSpec khn = random_khn(rng, 2, 3, 1, 6, Normalization::beta_rowsum, ComponentKind::identity);
  const KernelNetworkSpec khn2 = io::network_from_json<KernelLayerParams>(io::network_to_json(khn));
  EXPECT_EQ(khn_forward(R, khn2), khn_forward(R, khn));
  EXPECT_EQ(io::network_to_json(khn2), io::network_to_json(khn));
  EXPECT_EQ(io::network_to_json(khn)["kind"], "khn");
}

TEST(Json, MhmRoundTrip) {
  SplitMix64 rng(5);
  const MhmParams m = random_s5_answer_params(4, 1, 12, 8, rng);
  const MhmParams m2 = io::mhm_from_json(io::mhm_to_json(m));
  EXPECT_EQ(io::mhm_to_json(m2), io::mhm_to_json(m));
  const std::vector<std::string> prompt = {"12345", "21345", "32145"};
  EXPECT_EQ(mhm_step(prompt, m2).distribution, mhm_step(prompt, m).distribution);
  json broken = io::mhm_to_json(m);
  broken["vocabulary"].erase(0);
  EXPECT_ANY_THROW(io::mhm_from_json(broken));
}

TEST(Json, ConfigAndFixture) {
  for (Construct c : all_constructs()) {
    ConstructConfig cfg = config(c, 2, 3, 2, 5);
    cfg.normalization = Normalization::softmax;
    cfg.component = ComponentKind::identity;
    const ConstructConfig back = io::config_from_json(io::config_to_json(cfg));
    EXPECT_EQ(io::config_to_json(back), io::config_to_json(cfg)) << to_string(c);

    SplitMix64 rng(17);
    const auto xs = random_construct_inputs(cfg, rng);
    const json fx = json::parse(io::fixture_to_json(cfg, xs).dump());
    const auto ys = io::fixture_inputs(fx, io::config_from_json(fx.at("config")));
    ASSERT_EQ(ys.size(), xs.size()) << to_string(c);
    for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_EQ(ys[i], xs[i]) << to_string(c) << " input " << i;
  }
  EXPECT_THROW(io::config_from_json(json{{"construct", "conv"}}), std::invalid_argument);
  EXPECT_THROW(io::config_from_json(json{{"construct", "attn"}, {"component", "mlp"}}), std::invalid_argument);
  EXPECT_THROW(io::config_from_json(json{{"construct", "attn"}, {"p", 1}}), std::invalid_argument);

  const ConstructConfig cfg = config(Construct::attn, 2, 2, 1, 4);
  SplitMix64 rng(1);
  json fx = io::fixture_to_json(cfg, random_construct_inputs(cfg, rng));
  json missing = fx;
  missing["inputs"].erase("W_K");
  EXPECT_THROW(io::fixture_inputs(missing, cfg), std::invalid_argument);
  json extra = fx;
  extra["inputs"]["W_Z"] = fx["inputs"]["W_K"];
  EXPECT_THROW(io::fixture_inputs(extra, cfg), std::invalid_argument);
  json shape = fx;
  shape["inputs"]["W_K"] = io::matrix_to_json(FpMatrix(3, 2, 4));
  EXPECT_ANY_THROW(io::fixture_inputs(shape, cfg));
}

TEST(Json, FilesAndParseErrors) {
  const std::string path = testing::TempDir() + "hopcirc_io_test.json";
  const json j = {{"a", 1}, {"b", {1, 2}}};
  io::write_json_file(path, j);
  EXPECT_EQ(io::read_json_file(path), j);
  {
    std::ofstream out(path);
    out << "{\"a\": ";
  }
  EXPECT_THROW(io::read_json_file(path), std::invalid_argument);
  EXPECT_THROW(io::read_json_file(path + ".missing"), std::runtime_error);
}
