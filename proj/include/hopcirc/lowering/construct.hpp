#pragma once

#include "hopcirc/hopfield.hpp"

namespace hopcirc {

enum class Construct { matmul, attn, hop_layer, fnn, mhn, kattn, khop, khn };

inline const std::vector<Construct>& all_constructs() {
  static const std::vector<Construct> all = {Construct::matmul, Construct::attn,  Construct::hop_layer,
                                             Construct::fnn,    Construct::mhn,   Construct::kattn,
                                             Construct::khop,   Construct::khn};
  return all;
}

inline const char* to_string(Construct c) {
  switch (c) {
    case Construct::matmul: return "matmul";
    case Construct::attn: return "attn";
    case Construct::hop_layer: return "hop_layer";
    case Construct::fnn: return "fnn";
    case Construct::mhn: return "mhn";
    case Construct::kattn: return "kattn";
    case Construct::khop: return "khop";
    case Construct::khn: return "khn";
  }
  return "?";
}

inline Construct parse_construct(const std::string& s) {
  for (Construct c : all_constructs()) {
    if (s == to_string(c)) return c;
  }
  throw std::invalid_argument("unknown construct '" + s + "' (expected matmul, attn, hop_layer, fnn, mhn, kattn, "
                              "khop or khn)");
}

inline bool is_network(Construct c) { return c == Construct::mhn || c == Construct::khn; }

/// Everything that fixes a construct's circuit: shapes, precision and modes.
/// d_phi = 0 means d_phi = d.
struct ConstructConfig {
  Construct construct = Construct::attn;
  std::size_t n = 2;
  std::size_t d = 2;
  std::size_t m = 1;
  std::size_t d_phi = 0;
  int p = 4;
  Normalization normalization = Normalization::beta_rowsum;
  ComponentKind component = ComponentKind::fnn;

  std::size_t phi() const { return d_phi ? d_phi : d; }

  void validate() const {
    if (n == 0 || d == 0) throw std::invalid_argument("construct: n and d must be positive");
    if (is_network(construct) && m == 0) throw std::invalid_argument("construct: m must be positive");
    check_precision(p);
  }
};

using Shape = std::pair<std::size_t, std::size_t>;

struct InputSlot {
  std::string name;
  std::size_t rows;
  std::size_t cols;

  bool is_beta() const { return name == "beta" || name.ends_with(".beta"); }
};

/// Circuit input order, one matrix per slot (row-major within a matrix):
///   matmul     A (n x d), B (d x n)
///   attn       R, Y, W_Q, W_K, beta
///   hop_layer  R, Y, W_Q, W_K, W_V, beta
///   fnn        X, W_1, b_1, W_2, b_2
///   kattn      R, Y, W_Q, W_K, W, beta
///   khop       R, Y, W_Q, W_K, W_V, W, beta
///   mhn / khn  R, f0, then per layer i: Li.Y, Li.<layer parameters>, fi
/// where fi lists fi.W_1, fi.b_1, fi.W_2, fi.b_2 for FNN components and
/// nothing for identity components.
inline std::vector<InputSlot> construct_inputs(const ConstructConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.n, d = cfg.d, k = cfg.phi();
  std::vector<InputSlot> out;
  const auto add = [&](const std::string& prefix, std::initializer_list<InputSlot> xs) {
    for (const auto& x : xs) out.push_back({prefix + x.name, x.rows, x.cols});
  };
  const auto component = [&](std::size_t i) {
    if (cfg.component == ComponentKind::fnn) {
      add("f" + std::to_string(i) + ".", {{"W_1", d, d}, {"b_1", d, 1}, {"W_2", d, d}, {"b_2", d, 1}});
    }
  };
  switch (cfg.construct) {
    case Construct::matmul: add("", {{"A", n, d}, {"B", d, n}}); break;
    case Construct::attn: add("", {{"R", n, d}, {"Y", n, d}, {"W_Q", d, d}, {"W_K", d, d}, {"beta", 1, 1}}); break;
    case Construct::hop_layer:
      add("", {{"R", n, d}, {"Y", n, d}, {"W_Q", d, d}, {"W_K", d, d}, {"W_V", d, d}, {"beta", 1, 1}});
      break;
    case Construct::fnn: add("", {{"X", n, d}, {"W_1", d, d}, {"b_1", d, 1}, {"W_2", d, d}, {"b_2", d, 1}}); break;
    case Construct::kattn:
      add("", {{"R", n, d}, {"Y", n, d}, {"W_Q", d, k}, {"W_K", d, k}, {"W", k, k}, {"beta", 1, 1}});
      break;
    case Construct::khop:
      add("", {{"R", n, d}, {"Y", n, d}, {"W_Q", d, k}, {"W_K", d, k}, {"W_V", d, d}, {"W", k, k}, {"beta", 1, 1}});
      break;
    case Construct::mhn:
    case Construct::khn:
      add("", {{"R", n, d}});
      component(0);
      for (std::size_t i = 1; i <= cfg.m; ++i) {
        const std::string L = "L" + std::to_string(i) + ".";
        if (cfg.construct == Construct::mhn) {
          add(L, {{"Y", n, d}, {"W_Q", d, d}, {"W_K", d, d}, {"W_V", d, d}, {"beta", 1, 1}});
        } else {
          add(L, {{"Y", n, d}, {"W_Q", d, k}, {"W_K", d, k}, {"W_V", d, d}, {"W", k, k}, {"beta", 1, 1}});
        }
        component(i);
      }
      break;
  }
  return out;
}

inline Shape construct_output_shape(const ConstructConfig& cfg) {
  switch (cfg.construct) {
    case Construct::matmul:
    case Construct::attn:
    case Construct::kattn: return {cfg.n, cfg.n};
    default: return {cfg.n, cfg.d};
  }
}

namespace detail {

/// Sequential reader over a construct's input list.
class InputCursor {
 public:
  explicit InputCursor(std::span<const FpMatrix> xs) : xs_(xs) {}
  const FpMatrix& next() {
    if (k_ >= xs_.size()) throw std::invalid_argument("construct inputs: too few matrices");
    return xs_[k_++];
  }
  FpNum scalar() { return next()(0, 0); }
  Component component(ComponentKind kind) {
    if (kind == ComponentKind::identity) return IdentityComponent{};
    FnnParams f;
    f.W_1 = next();
    f.b_1 = next();
    f.W_2 = next();
    f.b_2 = next();
    return f;
  }

 private:
  std::span<const FpMatrix> xs_;
  std::size_t k_ = 0;
};

inline void check_inputs(const ConstructConfig& cfg, std::span<const FpMatrix> xs) {
  const auto shapes = construct_inputs(cfg);
  if (xs.size() != shapes.size()) {
    throw std::invalid_argument(std::string("construct ") + to_string(cfg.construct) + ": expected " +
                                std::to_string(shapes.size()) + " input matrices, got " + std::to_string(xs.size()));
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i].rows() != shapes[i].rows || xs[i].cols() != shapes[i].cols || xs[i].precision() != cfg.p) {
      throw std::invalid_argument(std::string("construct ") + to_string(cfg.construct) + ": input " +
                                  shapes[i].name + " is " + shape_string(xs[i]) + " at p=" +
                                  std::to_string(xs[i].precision()) + ", expected " +
                                  std::to_string(shapes[i].rows) + "x" + std::to_string(shapes[i].cols) +
                                  " at p=" + std::to_string(cfg.p));
    }
  }
}

}  // namespace detail

inline NetworkSpec network_spec_from_inputs(const ConstructConfig& cfg, std::span<const FpMatrix> xs) {
  detail::InputCursor in(xs);
  in.next();
  NetworkSpec spec;
  spec.precision = cfg.p;
  spec.components.push_back(in.component(cfg.component));
  for (std::size_t i = 0; i < cfg.m; ++i) {
    spec.stored_patterns.push_back(in.next());
    HopfieldLayerParams lp;
    lp.W_Q = in.next();
    lp.W_K = in.next();
    lp.W_V_tilde = in.next();
    lp.beta = in.scalar();
    lp.normalization = cfg.normalization;
    spec.layers.push_back(lp);
    spec.components.push_back(in.component(cfg.component));
  }
  return spec;
}

inline KernelNetworkSpec kernel_spec_from_inputs(const ConstructConfig& cfg, std::span<const FpMatrix> xs) {
  detail::InputCursor in(xs);
  in.next();
  KernelNetworkSpec spec;
  spec.precision = cfg.p;
  spec.components.push_back(in.component(cfg.component));
  for (std::size_t i = 0; i < cfg.m; ++i) {
    spec.stored_patterns.push_back(in.next());
    KernelLayerParams kp;
    kp.W_Q = in.next();
    kp.W_K = in.next();
    kp.W_V = in.next();
    kp.W = in.next();
    kp.beta = in.scalar();
    kp.normalization = cfg.normalization;
    spec.layers.push_back(kp);
    spec.components.push_back(in.component(cfg.component));
  }
  return spec;
}

inline void append_component(std::vector<FpMatrix>& out, const Component& c) {
  if (const auto* f = std::get_if<FnnParams>(&c)) out.insert(out.end(), {f->W_1, f->b_1, f->W_2, f->b_2});
}

inline std::vector<FpMatrix> network_inputs(const FpMatrix& R, const NetworkSpec& spec) {
  std::vector<FpMatrix> out{R};
  append_component(out, spec.components[0]);
  for (std::size_t i = 0; i < spec.m(); ++i) {
    const auto& lp = spec.layers[i];
    out.insert(out.end(), {spec.stored_patterns[i], lp.W_Q, lp.W_K, lp.W_V_tilde, FpMatrix(1, 1, spec.precision, {lp.beta})});
    append_component(out, spec.components[i + 1]);
  }
  return out;
}

inline std::vector<FpMatrix> network_inputs(const FpMatrix& R, const KernelNetworkSpec& spec) {
  std::vector<FpMatrix> out{R};
  append_component(out, spec.components[0]);
  for (std::size_t i = 0; i < spec.m(); ++i) {
    const auto& kp = spec.layers[i];
    out.insert(out.end(), {spec.stored_patterns[i], kp.W_Q, kp.W_K, kp.W_V, kp.W,
                           FpMatrix(1, 1, spec.precision, {kp.beta})});
    append_component(out, spec.components[i + 1]);
  }
  return out;
}

/// The reference forward pass a construct's circuit must reproduce.
inline FpMatrix reference_forward(const ConstructConfig& cfg, std::span<const FpMatrix> xs) {
  detail::check_inputs(cfg, xs);
  detail::InputCursor in(xs);
  const int p = cfg.p;
  switch (cfg.construct) {
    case Construct::matmul: {
      const FpMatrix& a = in.next();
      return matmul(a, in.next());
    }
    case Construct::attn:
    case Construct::hop_layer: {
      const FpMatrix& R = in.next();
      const FpMatrix& Y = in.next();
      HopfieldLayerParams lp;
      lp.W_Q = in.next();
      lp.W_K = in.next();
      lp.W_V_tilde = cfg.construct == Construct::hop_layer ? in.next() : FpMatrix::identity(cfg.d, p);
      lp.beta = in.scalar();
      lp.normalization = cfg.normalization;
      return cfg.construct == Construct::attn ? attention_matrix(R, Y, lp) : hopfield_layer(R, Y, lp);
    }
    case Construct::fnn: {
      const FpMatrix& X = in.next();
      return fnn_forward(X, std::get<FnnParams>(in.component(ComponentKind::fnn)));
    }
    case Construct::kattn:
    case Construct::khop: {
      const FpMatrix& R = in.next();
      const FpMatrix& Y = in.next();
      KernelLayerParams kp;
      kp.W_Q = in.next();
      kp.W_K = in.next();
      kp.W_V = cfg.construct == Construct::khop ? in.next() : FpMatrix::identity(cfg.d, p);
      kp.W = in.next();
      kp.beta = in.scalar();
      kp.normalization = cfg.normalization;
      return cfg.construct == Construct::kattn ? kernel_attention_matrix(R, Y, kp) : khop_layer(R, Y, kp);
    }
    case Construct::mhn: return mhn_forward(xs[0], network_spec_from_inputs(cfg, xs));
    case Construct::khn: return khn_forward(xs[0], kernel_spec_from_inputs(cfg, xs));
  }
  throw std::logic_error("reference_forward: unhandled construct");
}

/// Random inputs in the construct's layout; beta entries are positive.
inline std::vector<FpMatrix> random_construct_inputs(const ConstructConfig& cfg, SplitMix64& rng,
                                                     RandomRange range = {}) {
  std::vector<FpMatrix> out;
  for (const InputSlot& s : construct_inputs(cfg)) {
    if (s.is_beta()) out.push_back(FpMatrix(1, 1, cfg.p, {random_beta(rng, cfg.p)}));
    else out.push_back(random_matrix(rng, s.rows, s.cols, cfg.p, range));
  }
  return out;
}

}  // namespace hopcirc
