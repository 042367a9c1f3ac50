#pragma once

#include "hopcirc/hopfield/network.hpp"

namespace hopcirc {

namespace detail {

inline void require_shape(const FpMatrix& a, std::size_t rows, std::size_t cols, const char* what) {
  if (a.rows() != rows || a.cols() != cols) {
    throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(rows) + "x" +
                                std::to_string(cols) + ", got " + shape_string(a));
  }
}

inline void check_layer(const FpMatrix& R, const FpMatrix& Y, const HopfieldLayerParams& lp) {
  const std::size_t d = R.cols();
  require_shape(Y, Y.rows(), d, "Y");
  require_shape(lp.W_Q, d, d, "W_Q");
  require_shape(lp.W_K, d, d, "W_K");
  require_shape(lp.W_V_tilde, d, d, "W_V_tilde");
  require_positive(lp.beta, "hopfield layer");
}

}  // namespace detail

/// Pre-exponent scores ((R W_Q) W_K^T) Y^T, associated left to right so the
/// query side passes through every product.
inline FpMatrix attention_scores(const FpMatrix& R, const FpMatrix& Y, const HopfieldLayerParams& lp,
                                 FpFlags* flags = nullptr) {
  detail::check_layer(R, Y, lp);
  const FpMatrix q = matmul(R, lp.W_Q, flags);
  return matmul(matmul(q, transpose(lp.W_K), flags), transpose(Y), flags);
}

/// A_ij = exp(beta * S_ij).
inline FpMatrix exp_scores(const FpMatrix& S, const FpNum& beta, FpFlags* flags = nullptr) {
  FpMatrix A(S.rows(), S.cols(), S.precision());
  for (std::size_t k = 0; k < S.size(); ++k) {
    A.entries()[k] = fp_exp(fp_mul(beta, S.entries()[k], flags), flags);
  }
  return A;
}

inline FpMatrix attention_matrix(const FpMatrix& R, const FpMatrix& Y, const HopfieldLayerParams& lp,
                                 FpFlags* flags = nullptr) {
  return exp_scores(attention_scores(R, Y, lp, flags), lp.beta, flags);
}

/// D^{-1} A with D = diag(beta * A 1).
inline FpMatrix beta_rowsum_normalize(const FpMatrix& A, const FpNum& beta, FpFlags* flags = nullptr) {
  const int p = A.precision();
  FpMatrix P(A.rows(), A.cols(), p);
  for (std::size_t i = 0; i < A.rows(); ++i) {
    const FpNum d = fp_mul(beta, iter_add(A.row(i), p, flags), flags);
    if (d.is_zero()) throw std::domain_error("beta_rowsum: zero diagonal entry in D at row " + std::to_string(i));
    for (std::size_t j = 0; j < A.cols(); ++j) P(i, j) = fp_div(A(i, j), d, flags);
  }
  return P;
}

/// Normalized attention weights from pre-exponent scores.
inline FpMatrix attention_weights(const FpMatrix& S, const FpNum& beta, Normalization mode,
                                  FpFlags* flags = nullptr) {
  if (mode == Normalization::softmax) return softmax_rows(S, beta, flags);
  return beta_rowsum_normalize(exp_scores(S, beta, flags), beta, flags);
}

/// ((P Y) W_V): normalization first, then the two products left to right.
inline FpMatrix attend(const FpMatrix& P, const FpMatrix& Y, const FpMatrix& W_V, FpFlags* flags = nullptr) {
  return matmul(matmul(P, Y, flags), W_V, flags);
}

inline FpMatrix hopfield_layer(const FpMatrix& R, const FpMatrix& Y, const HopfieldLayerParams& lp,
                               FpFlags* flags = nullptr) {
  const FpMatrix S = attention_scores(R, Y, lp, flags);
  return attend(attention_weights(S, lp.beta, lp.normalization, flags), Y, lp.W_V_tilde, flags);
}

/// Row-wise W_2 ReLU(W_1 x + b_1) + b_2.
inline FpMatrix fnn_forward(const FpMatrix& X, const FnnParams& f, FpFlags* flags = nullptr) {
  const std::size_t d = X.cols();
  detail::require_shape(f.W_1, d, d, "W_1");
  detail::require_shape(f.W_2, d, d, "W_2");
  detail::require_shape(f.b_1, d, 1, "b_1");
  detail::require_shape(f.b_2, d, 1, "b_2");
  // Row i of X W^T is (W X_i^T)^T: same products, same single-rounded sums.
  const FpMatrix h = relu(add_row_bias(matmul(X, transpose(f.W_1), flags), f.b_1, flags));
  return add_row_bias(matmul(h, transpose(f.W_2), flags), f.b_2, flags);
}

inline FpMatrix apply_component(const Component& c, const FpMatrix& X, FpFlags* flags = nullptr) {
  if (const auto* f = std::get_if<FnnParams>(&c)) return fnn_forward(X, *f, flags);
  return X;
}

/// f_m(Hop_m(... f_1(Hop_1(f_0(R), Y_1)) ..., Y_m)).
template <class Layer, class LayerFn>
FpMatrix network_forward(const FpMatrix& R, const BasicNetworkSpec<Layer>& spec, LayerFn layer_fn,
                         FpFlags* flags = nullptr) {
  spec.validate();
  FpMatrix h = apply_component(spec.components[0], R, flags);
  for (std::size_t i = 0; i < spec.m(); ++i) {
    h = layer_fn(h, spec.stored_patterns[i], spec.layers[i], flags);
    h = apply_component(spec.components[i + 1], h, flags);
  }
  return h;
}

inline FpMatrix mhn_forward(const FpMatrix& R, const NetworkSpec& spec, FpFlags* flags = nullptr) {
  return network_forward(
      R, spec,
      [](const FpMatrix& h, const FpMatrix& Y, const HopfieldLayerParams& lp, FpFlags* fl) {
        return hopfield_layer(h, Y, lp, fl);
      },
      flags);
}

}  // namespace hopcirc
