#pragma once

#include "hopcirc/linalg.hpp"

#include <variant>

namespace hopcirc {

enum class Normalization { softmax, beta_rowsum };

inline const char* to_string(Normalization n) {
  return n == Normalization::softmax ? "softmax" : "beta_rowsum";
}

inline Normalization parse_normalization(const std::string& s) {
  if (s == "softmax") return Normalization::softmax;
  if (s == "beta_rowsum") return Normalization::beta_rowsum;
  throw std::invalid_argument("unknown normalization '" + s + "'");
}

struct HopfieldLayerParams {
  FpMatrix W_Q;        // d x d
  FpMatrix W_K;        // d x d
  FpMatrix W_V_tilde;  // d x d (standalone, or W_K * W_V)
  FpNum beta;
  Normalization normalization = Normalization::softmax;
};

struct FnnParams {
  FpMatrix W_1, W_2;  // d x d
  FpMatrix b_1, b_2;  // d x 1
};

struct IdentityComponent {};

using Component = std::variant<IdentityComponent, FnnParams>;

/// m layers, m stored-pattern matrices Y_i and m + 1 components f_0..f_m.
template <class Layer>
struct BasicNetworkSpec {
  int precision = 0;
  std::vector<Layer> layers;
  std::vector<FpMatrix> stored_patterns;
  std::vector<Component> components;

  std::size_t m() const { return layers.size(); }

  void validate() const {
    if (layers.empty()) throw std::invalid_argument("network: at least one layer required");
    if (stored_patterns.size() != layers.size()) {
      throw std::invalid_argument("network: need one stored-pattern matrix per layer");
    }
    if (components.size() != layers.size() + 1) {
      throw std::invalid_argument("network: need m + 1 components");
    }
  }
};

using NetworkSpec = BasicNetworkSpec<HopfieldLayerParams>;

}  // namespace hopcirc
