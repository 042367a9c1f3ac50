#pragma once

#include "hopcirc/hopfield/retrieval.hpp"

namespace hopcirc {

/// Linear feature map Phi(u) = W u. W_Q, W_K are d x D_phi, W is D_phi x D_phi.
struct KernelLayerParams {
  FpMatrix W_Q;
  FpMatrix W_K;
  FpMatrix W_V;  // d x d
  FpMatrix W;
  FpNum beta;
  Normalization normalization = Normalization::softmax;

  std::size_t d_phi() const { return W.rows(); }
};

using KernelNetworkSpec = BasicNetworkSpec<KernelLayerParams>;

/// Phi applied to every row: u -> (W u^T)^T, i.e. U W^T.
inline FpMatrix feature_map_linear(const FpMatrix& U, const FpMatrix& W, FpFlags* flags = nullptr) {
  if (W.rows() != W.cols() || U.cols() != W.cols()) {
    throw std::invalid_argument("feature_map_linear: shape mismatch " + shape_string(U) + ", W " +
                                shape_string(W));
  }
  return matmul(U, transpose(W), flags);
}

/// Scores s_ij = (W (R_i W_Q)^T)^T (W (Y_j W_K)^T), evaluated as the chain
/// ((((R W_Q) W^T) W) W_K^T) Y^T, left to right.
inline FpMatrix kernel_scores(const FpMatrix& R, const FpMatrix& Y, const KernelLayerParams& kp,
                              FpFlags* flags = nullptr) {
  const std::size_t d = R.cols(), dphi = kp.d_phi();
  detail::require_shape(Y, Y.rows(), d, "Y");
  detail::require_shape(kp.W_Q, d, dphi, "W_Q");
  detail::require_shape(kp.W_K, d, dphi, "W_K");
  detail::require_shape(kp.W, dphi, dphi, "W");
  detail::require_positive(kp.beta, "kernel layer");
  const FpMatrix phi_q = feature_map_linear(matmul(R, kp.W_Q, flags), kp.W, flags);
  const FpMatrix mixed = matmul(matmul(phi_q, kp.W, flags), transpose(kp.W_K), flags);
  return matmul(mixed, transpose(Y), flags);
}

inline FpMatrix kernel_attention_matrix(const FpMatrix& R, const FpMatrix& Y, const KernelLayerParams& kp,
                                        FpFlags* flags = nullptr) {
  return exp_scores(kernel_scores(R, Y, kp, flags), kp.beta, flags);
}

inline FpMatrix khop_layer(const FpMatrix& R, const FpMatrix& Y, const KernelLayerParams& kp,
                           FpFlags* flags = nullptr) {
  detail::require_shape(kp.W_V, R.cols(), R.cols(), "W_V");
  const FpMatrix S = kernel_scores(R, Y, kp, flags);
  return attend(attention_weights(S, kp.beta, kp.normalization, flags), Y, kp.W_V, flags);
}

inline FpMatrix khn_forward(const FpMatrix& R, const KernelNetworkSpec& spec, FpFlags* flags = nullptr) {
  return network_forward(
      R, spec,
      [](const FpMatrix& h, const FpMatrix& Y, const KernelLayerParams& kp, FpFlags* fl) {
        return khop_layer(h, Y, kp, fl);
      },
      flags);
}

/// K(Xi, x) = Phi(Xi)^T Phi(x), Phi acting on columns.
inline FpMatrix kernel_similarity(const FpMatrix& Xi, const FpMatrix& x, const FpMatrix& W,
                                  FpFlags* flags = nullptr) {
  if (W.rows() != W.cols() || W.cols() != Xi.rows()) {
    throw std::invalid_argument("kernel: W must be " + std::to_string(Xi.rows()) + "x" +
                                std::to_string(Xi.rows()));
  }
  return matmul(transpose(matmul(W, Xi, flags)), matmul(W, x, flags), flags);
}

/// Xi softmax(beta K(Xi, x)).
inline FpMatrix kernel_retrieval_step(const RetrievalInstance& inst, const FpMatrix& W,
                                      FpFlags* flags = nullptr) {
  inst.validate();
  const FpMatrix scores = kernel_similarity(inst.Xi, inst.x, W, flags);
  return matmul(inst.Xi, softmax_cols(scores, inst.beta, flags), flags);
}

/// K(x, x) / 2 + lse(beta, K(Xi, x)) -- plus sign kept as defined.
inline FpNum kernel_energy(const RetrievalInstance& inst, const FpMatrix& W, FpFlags* flags = nullptr) {
  inst.validate();
  if (inst.x.cols() != 1) throw std::invalid_argument("kernel_energy: single query expected");
  const int p = inst.x.precision();
  const FpNum kxx = kernel_similarity(inst.x, inst.x, W, flags)(0, 0);
  const FpNum l = lse(inst.beta, kernel_similarity(inst.Xi, inst.x, W, flags), flags);
  return fp_add(fp_mul(half(p), kxx, flags), l, flags);
}

}  // namespace hopcirc
