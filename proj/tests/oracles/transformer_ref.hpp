#pragma once

// Plain single-head self-attention over F_p, written against raw vectors and
// the scalar operations only:
//   out = softmax(beta * X W_Q W_K^T X^T) X W_V,
// score products associated left to right, each dot product one iterated sum,
// softmax normalized before the value products.

#include "hopcirc/fp.hpp"

#include <vector>

namespace oracle {

using hopcirc::FpNum;
using Mat = std::vector<std::vector<FpNum>>;

inline FpNum dot(const std::vector<FpNum>& a, const std::vector<FpNum>& b, int p) {
  std::vector<FpNum> prods;
  for (std::size_t k = 0; k < a.size(); ++k) prods.push_back(hopcirc::fp_mul(a[k], b[k]));
  return hopcirc::iter_add(prods, p);
}

inline std::vector<FpNum> column(const Mat& m, std::size_t j) {
  std::vector<FpNum> out;
  for (const auto& row : m) out.push_back(row[j]);
  return out;
}

inline Mat product(const Mat& a, const Mat& b, int p) {
  Mat out(a.size(), std::vector<FpNum>(b.front().size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.front().size(); ++j) out[i][j] = dot(a[i], column(b, j), p);
  return out;
}

inline Mat self_attention(const Mat& X, const Mat& W_Q, const Mat& W_K, const Mat& W_V,
                          const FpNum& beta, int p) {
  const Mat xq = product(X, W_Q, p);
  // q[i][j] = <row i of X W_Q, row j of W_K>
  Mat q(X.size(), std::vector<FpNum>(W_K.size()));
  for (std::size_t i = 0; i < X.size(); ++i)
    for (std::size_t j = 0; j < W_K.size(); ++j) q[i][j] = dot(xq[i], W_K[j], p);
  const std::size_t n = X.size();
  Mat probs(n, std::vector<FpNum>(n));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<FpNum> e(n);
    for (std::size_t j = 0; j < n; ++j) e[j] = hopcirc::fp_exp(hopcirc::fp_mul(beta, dot(q[i], X[j], p)));
    const FpNum z = hopcirc::iter_add(e, p);
    for (std::size_t j = 0; j < n; ++j) probs[i][j] = hopcirc::fp_div(e[j], z);
  }
  return product(product(probs, X, p), W_V, p);
}

}  // namespace oracle
