#pragma once

#include "hopcirc/hopfield/layer.hpp"

namespace hopcirc {

/// Memory patterns as the columns of Xi (d x M), query x (d x 1, or d x L for
/// a batch of queries).
struct RetrievalInstance {
  FpMatrix Xi;
  FpMatrix x;
  FpNum beta;

  std::size_t M() const { return Xi.cols(); }

  void validate() const {
    if (Xi.cols() == 0) throw std::invalid_argument("retrieval: M >= 1 required");
    if (x.rows() != Xi.rows()) throw std::invalid_argument("retrieval: query dimension mismatch");
    detail::require_positive(beta, "retrieval");
  }
};

/// Xi softmax(beta Xi^T x), softmax column-wise.
inline FpMatrix retrieval_step(const RetrievalInstance& inst, FpFlags* flags = nullptr) {
  inst.validate();
  const FpMatrix scores = matmul(transpose(inst.Xi), inst.x, flags);
  return matmul(inst.Xi, softmax_cols(scores, inst.beta, flags), flags);
}

inline FpNum half(int p) { return {significand_min(p), -p, p}; }

/// -lse(beta, Xi^T x) + <x, x> / 2 for a single query.
inline FpNum energy(const RetrievalInstance& inst, FpFlags* flags = nullptr) {
  inst.validate();
  if (inst.x.cols() != 1) throw std::invalid_argument("energy: single query expected");
  const int p = inst.x.precision();
  const FpMatrix scores = matmul(transpose(inst.Xi), inst.x, flags);
  const FpNum sq = matmul(transpose(inst.x), inst.x, flags)(0, 0);
  return fp_add(fp_neg(lse(inst.beta, scores, flags)), fp_mul(half(p), sq, flags), flags);
}

}  // namespace hopcirc
