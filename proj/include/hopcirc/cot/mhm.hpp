#pragma once

#include "hopcirc/hopfield/random.hpp"
#include "hopcirc/problems/instance.hpp"

#include <set>

namespace hopcirc {

/// Decoder-only model: token and position tables, L decoder layers (a
/// self-attention Hopfield layer followed by its component) and an output
/// head. Tables hold one row per token / position.
struct MhmParams {
  int p = 0;
  std::vector<std::string> vocabulary;
  FpMatrix token_embedding;     // |V| x d
  FpMatrix position_embedding;  // n_max x d
  FpMatrix output;              // |V| x d
  std::vector<HopfieldLayerParams> layers;
  std::vector<Component> components;  // one per layer

  std::size_t d() const { return token_embedding.cols(); }
  std::size_t n_max() const { return position_embedding.rows(); }

  std::size_t token_index(const std::string& tok) const {
    const auto it = std::find(vocabulary.begin(), vocabulary.end(), tok);
    if (it == vocabulary.end()) throw std::invalid_argument("unknown token '" + tok + "'");
    return static_cast<std::size_t>(it - vocabulary.begin());
  }

  void validate() const {
    const std::size_t V = vocabulary.size(), D = d();
    if (V == 0 || D == 0) throw std::invalid_argument("mhm: empty vocabulary or zero width");
    if (std::set<std::string>(vocabulary.begin(), vocabulary.end()).size() != V) {
      throw std::invalid_argument("mhm: duplicate vocabulary entries");
    }
    if (n_max() < 2) throw std::invalid_argument("mhm: n_max must be at least 2");
    const auto need = [&](const FpMatrix& m, std::size_t r, std::size_t c, const std::string& what) {
      if (m.rows() != r || m.cols() != c || m.precision() != p) {
        throw std::invalid_argument("mhm: " + what + " is " + shape_string(m) + " at p=" +
                                    std::to_string(m.precision()) + ", expected " + std::to_string(r) + "x" +
                                    std::to_string(c) + " at p=" + std::to_string(p));
      }
    };
    need(token_embedding, V, D, "token embedding");
    need(position_embedding, n_max(), D, "position embedding");
    need(output, V, D, "output head");
    if (layers.empty()) throw std::invalid_argument("mhm: at least one decoder layer required");
    if (components.size() != layers.size()) throw std::invalid_argument("mhm: need one component per layer");
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const std::string L = "layer " + std::to_string(l + 1) + " ";
      need(layers[l].W_Q, D, D, L + "W_Q");
      need(layers[l].W_K, D, D, L + "W_K");
      need(layers[l].W_V_tilde, D, D, L + "W_V");
      if (const auto* f = std::get_if<FnnParams>(&components[l])) {
        need(f->W_1, D, D, L + "W_1");
        need(f->W_2, D, D, L + "W_2");
        need(f->b_1, D, 1, L + "b_1");
        need(f->b_2, D, 1, L + "b_2");
      }
    }
  }
};

/// Row i = token_embedding(x_i) + position_embedding(i).
inline FpMatrix embed(const std::vector<std::string>& tokens, const MhmParams& params, FpFlags* flags = nullptr) {
  if (tokens.empty()) throw std::invalid_argument("embed: empty input");
  if (tokens.size() > params.n_max()) {
    throw std::invalid_argument("embed: " + std::to_string(tokens.size()) + " tokens exceed n_max = " +
                                std::to_string(params.n_max()));
  }
  FpMatrix h(tokens.size(), params.d(), params.p);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::size_t t = params.token_index(tokens[i]);
    for (std::size_t j = 0; j < params.d(); ++j) {
      h(i, j) = fp_add(params.token_embedding(t, j), params.position_embedding(i, j), flags);
    }
  }
  return h;
}

/// Decoder stack on the embedded sequence; every layer attends the current
/// hidden states to themselves (no masking).
inline FpMatrix decode(const FpMatrix& h0, const MhmParams& params, FpFlags* flags = nullptr) {
  FpMatrix h = h0;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    h = hopfield_layer(h, h, params.layers[l], flags);
    h = apply_component(params.components[l], h, flags);
  }
  return h;
}

struct MhmStep {
  FpMatrix distribution;  // |V| x 1
  std::size_t next = 0;
  std::string token;
};

/// softmax(output * h_n) for the last position; argmax ties go to the lowest
/// token index.
inline MhmStep mhm_step(const std::vector<std::string>& tokens, const MhmParams& params, FpFlags* flags = nullptr) {
  const FpMatrix h = decode(embed(tokens, params, flags), params, flags);
  FpMatrix last(params.d(), 1, params.p);
  for (std::size_t j = 0; j < params.d(); ++j) last(j, 0) = h(h.rows() - 1, j);
  MhmStep s;
  s.distribution = softmax_cols(matmul(params.output, last, flags), FpNum::one(params.p), flags);
  for (std::size_t k = 1; k < s.distribution.rows(); ++k) {
    if (fp_cmp(s.distribution(k, 0), s.distribution(s.next, 0)) > 0) s.next = k;
  }
  s.token = params.vocabulary[s.next];
  return s;
}

struct CotResult {
  std::vector<std::string> generated;
  std::size_t forward_passes = 0;
};

/// Appends the model's next token `steps` times (one forward pass each).
inline CotResult cot_generate(const std::vector<std::string>& tokens, const MhmParams& params, std::size_t steps,
                              FpFlags* flags = nullptr) {
  if (steps == 0) throw std::invalid_argument("cot_generate: steps must be at least 1");
  if (tokens.size() + steps > params.n_max() - 1) {
    throw std::invalid_argument("cot_generate: input length " + std::to_string(tokens.size()) + " plus " +
                                std::to_string(steps) + " steps exceeds n_max - 1 = " +
                                std::to_string(params.n_max() - 1));
  }
  CotResult r;
  std::vector<std::string> seq = tokens;
  for (std::size_t i = 0; i < steps; ++i) {
    const MhmStep s = mhm_step(seq, params, flags);
    ++r.forward_passes;
    seq.push_back(s.token);
    r.generated.push_back(s.token);
  }
  return r;
}

enum class Answer { no, yes, abstain };

inline const char* to_string(Answer a) {
  switch (a) {
    case Answer::no: return "no";
    case Answer::yes: return "yes";
    case Answer::abstain: return "abstain";
  }
  return "?";
}

struct WordProblemResult {
  Answer answer = Answer::abstain;
  bool label = false;
  bool correct = false;
  std::vector<std::string> trace;
  std::size_t forward_passes = 0;
};

/// Feeds the instance tokens, generates `steps` tokens and reads the last one
/// as yes / no; anything else abstains (and counts as incorrect).
inline WordProblemResult run_word_problem(const ProblemInstance& inst, const MhmParams& params, std::size_t steps) {
  if (inst.kind != ProblemKind::s5_word) throw std::invalid_argument("run_word_problem: expected an s5_word instance");
  const CotResult cot = cot_generate(inst.tokens, params, steps);
  WordProblemResult r;
  r.label = inst.label;
  r.trace = cot.generated;
  r.forward_passes = cot.forward_passes;
  const std::string& last = cot.generated.back();
  r.answer = last == "yes" ? Answer::yes : last == "no" ? Answer::no : Answer::abstain;
  r.correct = r.answer != Answer::abstain && (r.answer == Answer::yes) == inst.label;
  return r;
}

/// "yes", "no", then the 120 elements of S5.
inline std::vector<std::string> s5_vocabulary() {
  std::vector<std::string> v{"yes", "no"};
  for (const Perm5& f : s5_elements()) v.push_back(to_token(f));
  return v;
}

/// Random tables and decoder; softmax layers with FNN components. The
/// default magnitudes [1/16, 1/2) keep logits O(1) through a few layers.
inline MhmParams random_mhm_params(std::vector<std::string> vocabulary, std::size_t d, std::size_t layers,
                                   std::size_t n_max, int p, SplitMix64& rng, RandomRange range = {-4, -2, 0}) {
  MhmParams m;
  m.p = p;
  m.vocabulary = std::move(vocabulary);
  const std::size_t V = m.vocabulary.size();
  m.token_embedding = random_matrix(rng, V, d, p, range);
  m.position_embedding = random_matrix(rng, n_max, d, p, range);
  m.output = random_matrix(rng, V, d, p, range);
  for (std::size_t l = 0; l < layers; ++l) {
    m.layers.push_back(random_hopfield_layer(rng, d, p, Normalization::softmax, range));
    m.components.push_back(random_fnn(rng, d, p, range));
  }
  m.validate();
  return m;
}

/// Random S5 model whose output head can only pick yes or no: the "yes" row
/// is random, the "no" row is its negation and every other row is zero, so
/// the larger of the two answer logits is >= 0 and wins (ties go to "yes",
/// the lowest index).
inline MhmParams random_s5_answer_params(std::size_t d, std::size_t layers, std::size_t n_max, int p,
                                         SplitMix64& rng, RandomRange range = {-4, -2, 0}) {
  MhmParams m = random_mhm_params(s5_vocabulary(), d, layers, n_max, p, rng, range);
  const FpNum zero = FpNum::zero(p);
  for (std::size_t k = 2; k < m.vocabulary.size(); ++k) {
    for (std::size_t j = 0; j < d; ++j) m.output(k, j) = zero;
  }
  for (std::size_t j = 0; j < d; ++j) m.output(1, j) = fp_neg(m.output(0, j));
  return m;
}

}  // namespace hopcirc
