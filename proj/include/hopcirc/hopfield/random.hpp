#pragma once

#include "hopcirc/kernel/kernel.hpp"
#include "hopcirc/util/rng.hpp"

#include <algorithm>
#include <cmath>

namespace hopcirc {

/// Random F_p value with magnitude in [2^lo, 2^(hi+1)); zero with
/// probability 1/zero_odds when zero_odds > 0.
inline FpNum random_fp(SplitMix64& rng, int p, int lo, int hi, bool allow_negative = true,
                       int zero_odds = 0) {
  if (zero_odds > 0 && rng.below(static_cast<std::uint64_t>(zero_odds)) == 0) return FpNum::zero(p);
  std::int64_t m = rng.range(significand_min(p), significand_max(p));
  if (allow_negative && rng.coin()) m = -m;
  const std::int64_t e = rng.range(lo, hi) - (p - 1);
  return make_fp(m, std::clamp(e, exponent_min(p), exponent_max(p)), p);
}

struct RandomRange {
  int lo = -2;
  int hi = 0;
  int zero_odds = 0;
};

inline FpMatrix random_matrix(SplitMix64& rng, std::size_t rows, std::size_t cols, int p,
                              RandomRange range = {}) {
  FpMatrix out(rows, cols, p);
  for (auto& x : out.entries()) x = random_fp(rng, p, range.lo, range.hi, true, range.zero_odds);
  return out;
}

inline FpNum random_beta(SplitMix64& rng, int p) { return random_fp(rng, p, -1, 0, false); }

inline HopfieldLayerParams random_hopfield_layer(SplitMix64& rng, std::size_t d, int p,
                                                 Normalization mode = Normalization::softmax,
                                                 RandomRange range = {}) {
  HopfieldLayerParams lp;
  lp.W_Q = random_matrix(rng, d, d, p, range);
  lp.W_K = random_matrix(rng, d, d, p, range);
  lp.W_V_tilde = random_matrix(rng, d, d, p, range);
  lp.beta = random_beta(rng, p);
  lp.normalization = mode;
  return lp;
}

inline FnnParams random_fnn(SplitMix64& rng, std::size_t d, int p, RandomRange range = {}) {
  return {random_matrix(rng, d, d, p, range), random_matrix(rng, d, d, p, range),
          random_matrix(rng, d, 1, p, range), random_matrix(rng, d, 1, p, range)};
}

inline KernelLayerParams random_kernel_layer(SplitMix64& rng, std::size_t d, std::size_t d_phi, int p,
                                             Normalization mode = Normalization::softmax,
                                             RandomRange range = {}) {
  KernelLayerParams kp;
  kp.W_Q = random_matrix(rng, d, d_phi, p, range);
  kp.W_K = random_matrix(rng, d, d_phi, p, range);
  kp.W_V = random_matrix(rng, d, d, p, range);
  kp.W = random_matrix(rng, d_phi, d_phi, p, range);
  kp.beta = random_beta(rng, p);
  kp.normalization = mode;
  return kp;
}

enum class ComponentKind { identity, fnn };

template <class Layer, class MakeLayer>
BasicNetworkSpec<Layer> random_network(SplitMix64& rng, std::size_t n, std::size_t d, std::size_t m, int p,
                                       ComponentKind components, MakeLayer make_layer,
                                       RandomRange range = {}) {
  BasicNetworkSpec<Layer> spec;
  spec.precision = p;
  for (std::size_t i = 0; i < m; ++i) {
    spec.layers.push_back(make_layer(rng));
    spec.stored_patterns.push_back(random_matrix(rng, n, d, p, range));
  }
  for (std::size_t i = 0; i <= m; ++i) {
    if (components == ComponentKind::fnn) {
      spec.components.emplace_back(random_fnn(rng, d, p, range));
    } else {
      spec.components.emplace_back(IdentityComponent{});
    }
  }
  return spec;
}

inline NetworkSpec random_mhn(SplitMix64& rng, std::size_t n, std::size_t d, std::size_t m, int p,
                              Normalization mode, ComponentKind components, RandomRange range = {}) {
  return random_network<HopfieldLayerParams>(
      rng, n, d, m, p, components,
      [&](SplitMix64& r) { return random_hopfield_layer(r, d, p, mode, range); }, range);
}

inline KernelNetworkSpec random_khn(SplitMix64& rng, std::size_t n, std::size_t d, std::size_t m, int p,
                                    Normalization mode, ComponentKind components, RandomRange range = {}) {
  return random_network<KernelLayerParams>(
      rng, n, d, m, p, components,
      [&](SplitMix64& r) { return random_kernel_layer(r, d, d, p, mode, range); }, range);
}

inline double gaussian(SplitMix64& rng) {
  const double u1 = 1.0 - rng.unit(), u2 = rng.unit();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

/// M orthonormal columns of length d (Gram-Schmidt on Gaussian draws in
/// double precision), rounded to F_p.
inline FpMatrix orthonormal_patterns(SplitMix64& rng, std::size_t d, std::size_t M, int p) {
  if (M > d) throw std::invalid_argument("orthonormal_patterns: M > d");
  std::vector<std::vector<double>> cols;
  while (cols.size() < M) {
    std::vector<double> v(d);
    for (double& x : v) x = gaussian(rng);
    for (const auto& c : cols) {
      double dot = 0;
      for (std::size_t i = 0; i < d; ++i) dot += v[i] * c[i];
      for (std::size_t i = 0; i < d; ++i) v[i] -= dot * c[i];
    }
    double norm = 0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm < 1e-6) continue;
    for (double& x : v) x /= norm;
    cols.push_back(std::move(v));
  }
  FpMatrix out(d, M, p);
  for (std::size_t j = 0; j < M; ++j) {
    for (std::size_t i = 0; i < d; ++i) out(i, j) = from_double(cols[j][i], p);
  }
  return out;
}

}  // namespace hopcirc
