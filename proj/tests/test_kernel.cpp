#include "hopcirc/hopfield.hpp"
#include "oracles/real_oracle.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace hopcirc;
using oracle::Real;
using oracle::RMat;

namespace {

HopfieldLayerParams plain_of(const KernelLayerParams& kp) {
  return {kp.W_Q, kp.W_K, kp.W_V, kp.beta, kp.normalization};
}

KernelLayerParams with_identity_map(KernelLayerParams kp) {
  kp.W = FpMatrix::identity(kp.W.rows(), kp.W.precision());
  return kp;
}

NetworkSpec plain_of(const KernelNetworkSpec& k) {
  NetworkSpec out;
  out.precision = k.precision;
  for (const auto& kp : k.layers) out.layers.push_back(plain_of(kp));
  out.stored_patterns = k.stored_patterns;
  out.components = k.components;
  return out;
}

}  // namespace

TEST(FeatureMap, Examples) {
  SplitMix64 rng(41);
  const int p = 10;
  const FpMatrix U = random_matrix(rng, 2, 2, p);
  EXPECT_EQ(feature_map_linear(U, FpMatrix::identity(2, p)), U);
  EXPECT_EQ(feature_map_linear(U, FpMatrix(2, 2, p)), FpMatrix(2, 2, p));
  const FpMatrix W = random_matrix(rng, 2, 2, p);
  const FpMatrix got = feature_map_linear(U, W);
  for (std::size_t i = 0; i < 2; ++i) {
    const FpMatrix u(2, 1, p, U.row(i));
    EXPECT_EQ(got.row(i), matmul(W, u).col(0));
  }
  EXPECT_THROW(feature_map_linear(U, random_matrix(rng, 3, 3, p)), std::invalid_argument);
}

TEST(KernelAttention, IdentityMapReducesToPlain) {
  SplitMix64 rng(42);
  const int p = 10;
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 1 + rng.below(4), d = 1 + rng.below(4);
    const auto kp = with_identity_map(random_kernel_layer(rng, d, d, p));
    const FpMatrix R = random_matrix(rng, n, d, p), Y = random_matrix(rng, n, d, p);
    ASSERT_EQ(kernel_attention_matrix(R, Y, kp), attention_matrix(R, Y, plain_of(kp)));
  }
}

TEST(KernelAttention, OrthogonalAndUnitEntries) {
  const int p = 10;
  const FpMatrix I = FpMatrix::identity(2, p);
  KernelLayerParams kp{I, I, I, I, FpNum::one(p), Normalization::softmax};
  const FpMatrix A = kernel_attention_matrix(I, I, kp);
  EXPECT_EQ(A(0, 1), FpNum::one(p));
  EXPECT_EQ(A(1, 0), FpNum::one(p));
  EXPECT_EQ(A(0, 0), from_double(std::exp(1.0), p));
  EXPECT_EQ(A(1, 1), from_double(std::exp(1.0), p));
}

TEST(KernelAttention, SymmetricWhenProjectionsCoincide) {
  // Small weights keep score rounding far below one ulp of exp's output, so
  // the only asymmetry left is the final rounding of each entry.
  SplitMix64 rng(43);
  const int p = 10;
  const RandomRange small{-4, -3};
  for (int t = 0; t < 30; ++t) {
    auto kp = random_kernel_layer(rng, 3, 3, p, Normalization::softmax, small);
    kp.W_K = kp.W_Q;
    const FpMatrix Y = random_matrix(rng, 4, 3, p, small);
    const FpMatrix A = kernel_attention_matrix(Y, Y, kp);
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 4; ++j) {
        ASSERT_TRUE(oracle::close(to_double(A(i, j)), to_double(A(j, i)), std::ldexp(1.0, 2 - p)));
      }
    }
  }
}

TEST(KernelLayer, Examples) {
  SplitMix64 rng(44);
  const int p = 10;
  const auto kp = random_kernel_layer(rng, 3, 3, p);
  const FpMatrix R = random_matrix(rng, 1, 3, p), Y = random_matrix(rng, 1, 3, p);
  EXPECT_EQ(khop_layer(R, Y, kp), matmul(Y, kp.W_V));

  auto flat = kp;
  flat.W = FpMatrix(3, 3, p);
  const FpMatrix R4 = random_matrix(rng, 4, 3, p), Y4 = random_matrix(rng, 4, 3, p);
  const FpMatrix Z = khop_layer(R4, Y4, flat);
  const FpMatrix P(4, 4, p, std::vector<FpNum>(16, from_double(0.25, p)));
  EXPECT_EQ(Z, matmul(matmul(P, Y4), kp.W_V));
  for (std::size_t i = 1; i < 4; ++i) EXPECT_EQ(Z.row(i), Z.row(0));
}

TEST(KernelLayer, IdentityMapReducesToPlain) {
  SplitMix64 rng(45);
  const int p = 10;
  for (auto mode : {Normalization::softmax, Normalization::beta_rowsum}) {
    for (int t = 0; t < 50; ++t) {
      const std::size_t n = 1 + rng.below(4), d = 1 + rng.below(4);
      const auto kp = with_identity_map(random_kernel_layer(rng, d, d, p, mode));
      const FpMatrix R = random_matrix(rng, n, d, p), Y = random_matrix(rng, n, d, p);
      ASSERT_EQ(khop_layer(R, Y, kp), hopfield_layer(R, Y, plain_of(kp)));
    }
  }
}

TEST(KernelLayer, SoftmaxRowsSumToOne) {
  SplitMix64 rng(46);
  const int p = 10;
  for (int t = 0; t < 50; ++t) {
    const auto kp = random_kernel_layer(rng, 3, 3, p);
    const FpMatrix R = random_matrix(rng, 4, 3, p), Y = random_matrix(rng, 4, 3, p);
    const FpMatrix P = attention_weights(kernel_scores(R, Y, kp), kp.beta, Normalization::softmax);
    for (std::size_t i = 0; i < 4; ++i) {
      ASSERT_LE(std::fabs(to_double(iter_add(P.row(i), p)) - 1.0), std::ldexp(1.0, 2 - p));
    }
  }
}

TEST(Khn, StructureAndReductions) {
  SplitMix64 rng(47);
  const int p = 10;
  KernelNetworkSpec one = random_khn(rng, 3, 3, 1, p, Normalization::softmax, ComponentKind::identity);
  const FpMatrix R = random_matrix(rng, 3, 3, p);
  EXPECT_EQ(khn_forward(R, one), khop_layer(R, one.stored_patterns[0], one.layers[0]));

  KernelNetworkSpec net = random_khn(rng, 3, 3, 2, p, Normalization::softmax, ComponentKind::fnn);
  for (auto& kp : net.layers) kp = with_identity_map(kp);
  EXPECT_EQ(khn_forward(R, net), mhn_forward(R, plain_of(net)));

  net = random_khn(rng, 3, 3, 2, p, Normalization::beta_rowsum, ComponentKind::fnn);
  FpMatrix h = fnn_forward(R, std::get<FnnParams>(net.components[0]));
  for (std::size_t i = 0; i < 2; ++i) {
    h = khop_layer(h, net.stored_patterns[i], net.layers[i]);
    h = fnn_forward(h, std::get<FnnParams>(net.components[i + 1]));
  }
  EXPECT_EQ(khn_forward(R, net), h);
}

TEST(KernelRetrieval, Examples) {
  SplitMix64 rng(48);
  const int p = 24;
  for (int t = 0; t < 50; ++t) {
    const RetrievalInstance inst{random_matrix(rng, 4, 3, p), random_matrix(rng, 4, 1, p), random_beta(rng, p)};
    ASSERT_EQ(kernel_retrieval_step(inst, FpMatrix::identity(4, p)), retrieval_step(inst));
  }
  const FpMatrix xi = random_matrix(rng, 4, 1, p);
  EXPECT_EQ(kernel_retrieval_step({xi, random_matrix(rng, 4, 1, p), FpNum::one(p)}, random_matrix(rng, 4, 4, p)), xi);

  const FpMatrix pats = random_matrix(rng, 3, 4, p);
  const FpMatrix out = kernel_retrieval_step({pats, random_matrix(rng, 3, 1, p), FpNum::one(p)}, FpMatrix(3, 3, p));
  const FpMatrix P(4, 1, p, std::vector<FpNum>(4, from_double(0.25, p)));
  EXPECT_EQ(out, matmul(pats, P));
}

TEST(KernelEnergy, Examples) {
  SplitMix64 rng(49);
  const int p = 24;
  const FpNum beta = from_double(2.0, p);
  const RetrievalInstance inst{random_matrix(rng, 3, 5, p), random_matrix(rng, 3, 1, p), beta};
  EXPECT_TRUE(oracle::close(to_double(kernel_energy(inst, FpMatrix(3, 3, p))), std::log(5.0) / 2,
                            std::ldexp(1.0, 2 - p)));
  for (int t = 0; t < 100; ++t) {
    const RetrievalInstance r{random_matrix(rng, 3, 4, p), random_matrix(rng, 3, 1, p), random_beta(rng, p)};
    const FpMatrix W = random_matrix(rng, 3, 3, p);
    const RMat phx = oracle::mul(RMat(W), RMat(r.x));
    const RMat k = oracle::mul(oracle::tr(oracle::mul(RMat(W), RMat(r.Xi))), phx);
    const Real kxx = oracle::mul(oracle::tr(phx), phx)(0, 0);
    const Real l = oracle::lse(Real(r.beta), k);
    const double want = (kxx / Real(2.0) + l).to_double();
    const double scale = kxx.to_double() / 2 + std::fabs(l.to_double());
    ASSERT_TRUE(oracle::close(to_double(kernel_energy(r, W)), want, std::ldexp(1.0, 4 - p), scale));
  }
}
