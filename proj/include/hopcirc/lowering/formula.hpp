#pragma once

#include "hopcirc/lowering/construct.hpp"

#include <optional>

namespace hopcirc {

/// Closed-form depth a construct is claimed to have. `alternate` carries a
/// second stated value where two disagree; `value` is the one checked.
struct DepthFormula {
  DepthExpr value;
  std::optional<DepthExpr> alternate;
  std::string note;
};

inline DepthFormula depth_formula(Construct c, std::size_t m = 1) {
  const DepthExpr S = DepthExpr::std_op(), A = DepthExpr::sum(), E = DepthExpr::exp(), F = DepthExpr::f();
  const auto k = static_cast<std::int64_t>(m);
  switch (c) {
    case Construct::matmul: return {S + A, std::nullopt, ""};
    case Construct::attn: return {4 * S + 3 * A + E, std::nullopt, ""};
    case Construct::hop_layer: return {8 * S + 6 * A + E, std::nullopt, ""};
    case Construct::fnn: return {4 * S + 3 * A, std::nullopt, ""};
    case Construct::kattn:
      return {6 * S + 5 * A + E, 3 * S + 2 * A + E,
              "the step-by-step count gives 6d_std + 5d_⊕ + d_exp; the alternate closed form is "
              "3d_std + 2d_⊕ + d_exp"};
    case Construct::khop: return {10 * S + 8 * A + E, std::nullopt, ""};
    case Construct::mhn: {
      if (m == 0) throw std::invalid_argument("depth_formula: m must be positive");
      return {(k + 1) * F + k * (8 * S + 6 * A + E), std::nullopt, ""};
    }
    case Construct::khn: {
      if (m == 0) throw std::invalid_argument("depth_formula: m must be positive");
      return {(k + 1) * F + k * (10 * S + 8 * A + E), std::nullopt, ""};
    }
  }
  throw std::invalid_argument("depth_formula: unknown construct");
}

inline DepthFormula depth_formula(const ConstructConfig& cfg) {
  return depth_formula(cfg.construct, is_network(cfg.construct) ? cfg.m : 1);
}

}  // namespace hopcirc
