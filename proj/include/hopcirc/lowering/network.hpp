#pragma once

#include "hopcirc/lowering/construct.hpp"
#include "hopcirc/lowering/scalar.hpp"

namespace hopcirc {

/// Row-major matrix of F_p-encoded wire bundles.
struct WireMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<FpWires> entries;

  FpWires& operator()(std::size_t i, std::size_t j) { return entries[i * cols + j]; }
  const FpWires& operator()(std::size_t i, std::size_t j) const { return entries[i * cols + j]; }
};

namespace lower {

inline WireMatrix input_matrix(FpCircuitBuilder& fb, std::size_t rows, std::size_t cols) {
  WireMatrix out{rows, cols, {}};
  for (std::size_t k = 0; k < rows * cols; ++k) out.entries.push_back(fb.input());
  return out;
}

inline WireMatrix transpose(const WireMatrix& a) {
  WireMatrix out{a.cols, a.rows, std::vector<FpWires>(a.entries.size())};
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t j = 0; j < a.cols; ++j) out(j, i) = a(i, j);
  }
  return out;
}

/// One mul per product, one iter_add per entry.
inline WireMatrix matmul(FpCircuitBuilder& fb, const WireMatrix& a, const WireMatrix& b) {
  if (a.cols != b.rows) throw std::invalid_argument("lower::matmul: shape mismatch");
  WireMatrix out{a.rows, b.cols, {}};
  std::vector<FpWires> terms(a.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t j = 0; j < b.cols; ++j) {
      for (std::size_t k = 0; k < a.cols; ++k) terms[k] = fb.mul(a(i, k), b(k, j));
      out.entries.push_back(fb.iter_add(terms));
    }
  }
  return out;
}

inline WireMatrix exp_scores(FpCircuitBuilder& fb, const WireMatrix& S, const FpWires& beta) {
  WireMatrix out{S.rows, S.cols, {}};
  for (const FpWires& s : S.entries) out.entries.push_back(fb.exp(fb.mul(beta, s)));
  return out;
}

inline WireMatrix row_divide(FpCircuitBuilder& fb, const WireMatrix& A, std::span<const FpWires> den) {
  WireMatrix out{A.rows, A.cols, {}};
  for (std::size_t i = 0; i < A.rows; ++i) {
    for (std::size_t j = 0; j < A.cols; ++j) out.entries.push_back(fb.div(A(i, j), den[i]));
  }
  return out;
}

inline std::vector<FpWires> row_sums(FpCircuitBuilder& fb, const WireMatrix& A) {
  std::vector<FpWires> out;
  for (std::size_t i = 0; i < A.rows; ++i) {
    out.push_back(fb.iter_add(std::span(A.entries).subspan(i * A.cols, A.cols)));
  }
  return out;
}

inline WireMatrix attention_weights(FpCircuitBuilder& fb, const WireMatrix& S, const FpWires& beta,
                                    Normalization mode) {
  const WireMatrix A = exp_scores(fb, S, beta);
  std::vector<FpWires> den = row_sums(fb, A);
  if (mode == Normalization::beta_rowsum) {
    for (FpWires& d : den) d = fb.mul(beta, d);
  }
  return row_divide(fb, A, den);
}

inline WireMatrix add_row_bias(FpCircuitBuilder& fb, const WireMatrix& a, const WireMatrix& bias) {
  WireMatrix out{a.rows, a.cols, {}};
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t j = 0; j < a.cols; ++j) out.entries.push_back(fb.add(a(i, j), bias(j, 0)));
  }
  return out;
}

inline WireMatrix relu(FpCircuitBuilder& fb, const WireMatrix& a) {
  WireMatrix out{a.rows, a.cols, {}};
  for (const FpWires& x : a.entries) out.entries.push_back(fb.relu(x));
  return out;
}

struct FnnWires {
  WireMatrix W_1, b_1, W_2, b_2;
};

inline FnnWires fnn_inputs(FpCircuitBuilder& fb, std::size_t d) {
  FnnWires f;
  f.W_1 = input_matrix(fb, d, d);
  f.b_1 = input_matrix(fb, d, 1);
  f.W_2 = input_matrix(fb, d, d);
  f.b_2 = input_matrix(fb, d, 1);
  return f;
}

inline WireMatrix fnn(FpCircuitBuilder& fb, const WireMatrix& X, const FnnWires& f) {
  const WireMatrix h = relu(fb, add_row_bias(fb, matmul(fb, X, transpose(f.W_1)), f.b_1));
  return add_row_bias(fb, matmul(fb, h, transpose(f.W_2)), f.b_2);
}

/// Scores ((R W_Q) W_K^T) Y^T.
inline WireMatrix scores(FpCircuitBuilder& fb, const WireMatrix& R, const WireMatrix& Y, const WireMatrix& W_Q,
                         const WireMatrix& W_K) {
  return matmul(fb, matmul(fb, matmul(fb, R, W_Q), transpose(W_K)), transpose(Y));
}

/// Scores ((((R W_Q) W^T) W) W_K^T) Y^T.
inline WireMatrix kernel_scores(FpCircuitBuilder& fb, const WireMatrix& R, const WireMatrix& Y,
                                const WireMatrix& W_Q, const WireMatrix& W_K, const WireMatrix& W) {
  const WireMatrix phi_q = matmul(fb, matmul(fb, R, W_Q), transpose(W));
  return matmul(fb, matmul(fb, matmul(fb, phi_q, W), transpose(W_K)), transpose(Y));
}

inline WireMatrix attend(FpCircuitBuilder& fb, const WireMatrix& P, const WireMatrix& Y, const WireMatrix& W_V) {
  return matmul(fb, matmul(fb, P, Y), W_V);
}

}  // namespace lower

/// Lowers a construct to a circuit whose outputs are the reference forward
/// pass's entries (row-major), given the inputs in construct_inputs order.
inline LoweredArtifact lower_construct(const ConstructConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.n, d = cfg.d, k = cfg.phi();
  FpCircuitBuilder fb(cfg.p);
  const auto in = [&](std::size_t r, std::size_t c) { return lower::input_matrix(fb, r, c); };
  const auto scalar = [&] { return fb.input(); };
  const auto component = [&](std::size_t i, const WireMatrix& X) -> WireMatrix {
    // Parameters are read before the component region opens so inputs stay
    // in slot order.
    std::optional<lower::FnnWires> f;
    if (cfg.component == ComponentKind::fnn) f = lower::fnn_inputs(fb, d);
    const std::string name = "f" + std::to_string(i);
    fb.set_context(name);
    WireMatrix out = fb.component(name, [&] {
      if (f) return lower::fnn(fb, X, *f);
      WireMatrix y{X.rows, X.cols, {}};
      for (const FpWires& x : X.entries) y.entries.push_back(fb.buffer(x));
      return y;
    });
    fb.set_context("");
    return out;
  };

  WireMatrix out;
  switch (cfg.construct) {
    case Construct::matmul: {
      const WireMatrix A = in(n, d), B = in(d, n);
      out = lower::matmul(fb, A, B);
      break;
    }
    case Construct::attn:
    case Construct::hop_layer: {
      const WireMatrix R = in(n, d), Y = in(n, d), W_Q = in(d, d), W_K = in(d, d);
      const bool layer = cfg.construct == Construct::hop_layer;
      const WireMatrix W_V = layer ? in(d, d) : WireMatrix{};
      const FpWires beta = scalar();
      const WireMatrix S = lower::scores(fb, R, Y, W_Q, W_K);
      out = layer ? lower::attend(fb, lower::attention_weights(fb, S, beta, cfg.normalization), Y, W_V)
                  : lower::exp_scores(fb, S, beta);
      break;
    }
    case Construct::fnn: {
      const WireMatrix X = in(n, d);
      const lower::FnnWires f = lower::fnn_inputs(fb, d);
      out = lower::fnn(fb, X, f);
      break;
    }
    case Construct::kattn:
    case Construct::khop: {
      const WireMatrix R = in(n, d), Y = in(n, d), W_Q = in(d, k), W_K = in(d, k);
      const bool layer = cfg.construct == Construct::khop;
      const WireMatrix W_V = layer ? in(d, d) : WireMatrix{};
      const WireMatrix W = in(k, k);
      const FpWires beta = scalar();
      const WireMatrix S = lower::kernel_scores(fb, R, Y, W_Q, W_K, W);
      out = layer ? lower::attend(fb, lower::attention_weights(fb, S, beta, cfg.normalization), Y, W_V)
                  : lower::exp_scores(fb, S, beta);
      break;
    }
    case Construct::mhn:
    case Construct::khn: {
      const WireMatrix R = in(n, d);
      WireMatrix h = component(0, R);
      for (std::size_t i = 1; i <= cfg.m; ++i) {
        const WireMatrix Y = in(n, d);
        WireMatrix S;
        WireMatrix W_V;
        FpWires beta;
        if (cfg.construct == Construct::mhn) {
          const WireMatrix W_Q = in(d, d), W_K = in(d, d);
          W_V = in(d, d);
          beta = scalar();
          fb.set_context("L" + std::to_string(i));
          S = lower::scores(fb, h, Y, W_Q, W_K);
        } else {
          const WireMatrix W_Q = in(d, k), W_K = in(d, k);
          W_V = in(d, d);
          const WireMatrix W = in(k, k);
          beta = scalar();
          fb.set_context("L" + std::to_string(i));
          S = lower::kernel_scores(fb, h, Y, W_Q, W_K, W);
        }
        h = lower::attend(fb, lower::attention_weights(fb, S, beta, cfg.normalization), Y, W_V);
        fb.set_context("");
        h = component(i, h);
      }
      out = std::move(h);
      break;
    }
  }
  for (const FpWires& x : out.entries) fb.output(x);
  LoweredArtifact a = finish(std::move(fb), to_string(cfg.construct));
  for (const InputSlot& s : construct_inputs(cfg)) {
    a.input_shapes.emplace_back(s.rows, s.cols);
    a.input_names.push_back(s.name);
  }
  a.output_shape = construct_output_shape(cfg);
  return a;
}

/// Wraps a circuit obtained elsewhere (e.g. read from a netlist) with the
/// metadata lower_construct would give it; the circuit itself is unchecked.
inline LoweredArtifact artifact_for(const ConstructConfig& cfg, Circuit c) {
  cfg.validate();
  LoweredArtifact a;
  a.circuit = std::move(c);
  a.construct = to_string(cfg.construct);
  a.p = cfg.p;
  for (const InputSlot& s : construct_inputs(cfg)) {
    a.input_shapes.emplace_back(s.rows, s.cols);
    a.input_names.push_back(s.name);
  }
  a.output_shape = construct_output_shape(cfg);
  return a;
}

/// Flattens construct inputs into the circuit's input bits.
inline std::vector<std::uint8_t> encode_construct_inputs(const ConstructConfig& cfg, std::span<const FpMatrix> xs) {
  detail::check_inputs(cfg, xs);
  std::vector<std::uint8_t> bits;
  const FpBitEncoding enc{cfg.p};
  for (const FpMatrix& x : xs) {
    for (const FpNum& v : x.entries()) enc.encode_into(v, bits);
  }
  return bits;
}

inline FpMatrix decode_construct_output(const LoweredArtifact& a, std::span<const std::uint8_t> bits) {
  const auto [r, c] = a.output_shape;
  const std::vector<FpNum> xs = decode_all(bits, a.p);
  if (xs.size() != r * c) throw std::invalid_argument("decode_construct_output: output width mismatch");
  return FpMatrix(r, c, a.p, xs);
}

}  // namespace hopcirc
