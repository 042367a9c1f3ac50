#pragma once

#include "hopcirc/cot/mhm.hpp"
#include "hopcirc/kernel/kernel.hpp"
#include "hopcirc/lowering/construct.hpp"

#include <json.hpp>

#include <fstream>

namespace hopcirc::io {

using nlohmann::json;

// Matrices: {"rows", "cols", "p", "entries"} with entries row-major, each
// either an exact [m, e] pair or a number rounded to nearest in F_p.

inline json fp_to_json(const FpNum& x) { return json::array({x.m, x.e}); }

inline FpNum fp_from_json(const json& j, int p) {
  if (j.is_array()) {
    if (j.size() != 2) throw std::invalid_argument("fp value: expected [m, e]");
    return make_fp(j.at(0).get<std::int64_t>(), j.at(1).get<std::int64_t>(), p);
  }
  if (j.is_number()) return from_double(j.get<double>(), p);
  if (j.is_string()) {
    const FpNum x = parse_fp(j.get<std::string>());
    if (x.p != p) throw std::invalid_argument("fp value: literal precision differs from the enclosing p");
    return x;
  }
  throw std::invalid_argument("fp value: expected [m, e], a number or an fp(...) literal");
}

inline json matrix_to_json(const FpMatrix& a) {
  json entries = json::array();
  for (const FpNum& x : a.entries()) entries.push_back(fp_to_json(x));
  return {{"rows", a.rows()}, {"cols", a.cols()}, {"p", a.precision()}, {"entries", entries}};
}

inline FpMatrix matrix_from_json(const json& j, int default_p = 0) {
  const int p = j.contains("p") ? j.at("p").get<int>() : default_p;
  check_precision(p);
  const auto rows = j.at("rows").get<std::size_t>(), cols = j.at("cols").get<std::size_t>();
  const json& e = j.at("entries");
  if (!e.is_array() || e.size() != rows * cols) {
    throw std::invalid_argument("matrix: expected " + std::to_string(rows * cols) + " entries");
  }
  std::vector<FpNum> xs;
  for (const json& x : e) xs.push_back(fp_from_json(x, p));
  return FpMatrix(rows, cols, p, std::move(xs));
}

inline json component_to_json(const Component& c) {
  if (const auto* f = std::get_if<FnnParams>(&c)) {
    return {{"kind", "fnn"},
            {"W_1", matrix_to_json(f->W_1)},
            {"b_1", matrix_to_json(f->b_1)},
            {"W_2", matrix_to_json(f->W_2)},
            {"b_2", matrix_to_json(f->b_2)}};
  }
  return {{"kind", "identity"}};
}

inline Component component_from_json(const json& j, int p) {
  const std::string kind = j.is_string() ? j.get<std::string>() : j.at("kind").get<std::string>();
  if (kind == "identity") return IdentityComponent{};
  if (kind != "fnn") throw std::invalid_argument("component: unknown kind '" + kind + "'");
  return FnnParams{matrix_from_json(j.at("W_1"), p), matrix_from_json(j.at("W_2"), p), matrix_from_json(j.at("b_1"), p),
                   matrix_from_json(j.at("b_2"), p)};
}

inline json layer_to_json(const HopfieldLayerParams& lp) {
  return {{"W_Q", matrix_to_json(lp.W_Q)},
          {"W_K", matrix_to_json(lp.W_K)},
          {"W_V", matrix_to_json(lp.W_V_tilde)},
          {"beta", fp_to_json(lp.beta)},
          {"normalization", to_string(lp.normalization)}};
}

inline HopfieldLayerParams layer_from_json(const json& j, int p) {
  HopfieldLayerParams lp;
  lp.W_Q = matrix_from_json(j.at("W_Q"), p);
  lp.W_K = matrix_from_json(j.at("W_K"), p);
  lp.W_V_tilde = matrix_from_json(j.at("W_V"), p);
  lp.beta = fp_from_json(j.at("beta"), p);
  lp.normalization = parse_normalization(j.value("normalization", std::string("softmax")));
  return lp;
}

inline json layer_to_json(const KernelLayerParams& kp) {
  return {{"W_Q", matrix_to_json(kp.W_Q)},
          {"W_K", matrix_to_json(kp.W_K)},
          {"W_V", matrix_to_json(kp.W_V)},
          {"W", matrix_to_json(kp.W)},
          {"beta", fp_to_json(kp.beta)},
          {"normalization", to_string(kp.normalization)}};
}

inline KernelLayerParams kernel_layer_from_json(const json& j, int p) {
  KernelLayerParams kp;
  kp.W_Q = matrix_from_json(j.at("W_Q"), p);
  kp.W_K = matrix_from_json(j.at("W_K"), p);
  kp.W_V = matrix_from_json(j.at("W_V"), p);
  kp.W = matrix_from_json(j.at("W"), p);
  kp.beta = fp_from_json(j.at("beta"), p);
  kp.normalization = parse_normalization(j.value("normalization", std::string("softmax")));
  return kp;
}

/// {"kind": "mhn" | "khn", "p", "layers", "stored_patterns", "components"}.
template <class Layer>
json network_to_json(const BasicNetworkSpec<Layer>& spec) {
  json layers = json::array(), ys = json::array(), cs = json::array();
  for (const auto& l : spec.layers) layers.push_back(layer_to_json(l));
  for (const auto& y : spec.stored_patterns) ys.push_back(matrix_to_json(y));
  for (const auto& c : spec.components) cs.push_back(component_to_json(c));
  const bool kernel = std::is_same_v<Layer, KernelLayerParams>;
  return {{"kind", kernel ? "khn" : "mhn"},
          {"p", spec.precision},
          {"layers", layers},
          {"stored_patterns", ys},
          {"components", cs}};
}

template <class Layer>
BasicNetworkSpec<Layer> network_from_json(const json& j) {
  BasicNetworkSpec<Layer> spec;
  spec.precision = j.at("p").get<int>();
  check_precision(spec.precision);
  for (const json& l : j.at("layers")) {
    if constexpr (std::is_same_v<Layer, KernelLayerParams>) spec.layers.push_back(kernel_layer_from_json(l, spec.precision));
    else spec.layers.push_back(layer_from_json(l, spec.precision));
  }
  for (const json& y : j.at("stored_patterns")) spec.stored_patterns.push_back(matrix_from_json(y, spec.precision));
  for (const json& c : j.at("components")) spec.components.push_back(component_from_json(c, spec.precision));
  spec.validate();
  return spec;
}

inline json mhm_to_json(const MhmParams& m) {
  json layers = json::array(), cs = json::array();
  for (const auto& l : m.layers) layers.push_back(layer_to_json(l));
  for (const auto& c : m.components) cs.push_back(component_to_json(c));
  return {{"p", m.p},
          {"vocabulary", m.vocabulary},
          {"token_embedding", matrix_to_json(m.token_embedding)},
          {"position_embedding", matrix_to_json(m.position_embedding)},
          {"output", matrix_to_json(m.output)},
          {"layers", layers},
          {"components", cs}};
}

inline MhmParams mhm_from_json(const json& j) {
  MhmParams m;
  m.p = j.at("p").get<int>();
  check_precision(m.p);
  m.vocabulary = j.at("vocabulary").get<std::vector<std::string>>();
  m.token_embedding = matrix_from_json(j.at("token_embedding"), m.p);
  m.position_embedding = matrix_from_json(j.at("position_embedding"), m.p);
  m.output = matrix_from_json(j.at("output"), m.p);
  for (const json& l : j.at("layers")) m.layers.push_back(layer_from_json(l, m.p));
  for (const json& c : j.at("components")) m.components.push_back(component_from_json(c, m.p));
  m.validate();
  return m;
}

inline json config_to_json(const ConstructConfig& c) {
  return {{"construct", to_string(c.construct)},
          {"n", c.n},
          {"d", c.d},
          {"m", c.m},
          {"d_phi", c.phi()},
          {"p", c.p},
          {"normalization", to_string(c.normalization)},
          {"component", c.component == ComponentKind::fnn ? "fnn" : "identity"}};
}

inline ConstructConfig config_from_json(const json& j) {
  ConstructConfig c;
  c.construct = parse_construct(j.at("construct").get<std::string>());
  c.n = j.value("n", c.n);
  c.d = j.value("d", c.d);
  c.m = j.value("m", c.m);
  c.d_phi = j.value("d_phi", std::size_t{0});
  c.p = j.value("p", c.p);
  c.normalization = parse_normalization(j.value("normalization", std::string(to_string(c.normalization))));
  const std::string comp = j.value("component", std::string("fnn"));
  if (comp != "fnn" && comp != "identity") throw std::invalid_argument("unknown component kind '" + comp + "'");
  c.component = comp == "fnn" ? ComponentKind::fnn : ComponentKind::identity;
  c.validate();
  return c;
}

/// Construct inputs as {"config": ..., "inputs": {slot name: matrix}}.
inline json fixture_to_json(const ConstructConfig& cfg, std::span<const FpMatrix> xs) {
  const auto slots = construct_inputs(cfg);
  if (slots.size() != xs.size()) throw std::invalid_argument("fixture: input count mismatch");
  json inputs = json::object();
  for (std::size_t i = 0; i < xs.size(); ++i) inputs[slots[i].name] = matrix_to_json(xs[i]);
  return {{"config", config_to_json(cfg)}, {"inputs", inputs}};
}

/// Reads inputs in slot order; checks names, shapes and precision.
inline std::vector<FpMatrix> fixture_inputs(const json& j, const ConstructConfig& cfg) {
  const json& inputs = j.at("inputs");
  std::vector<FpMatrix> xs;
  for (const InputSlot& s : construct_inputs(cfg)) {
    if (!inputs.contains(s.name)) throw std::invalid_argument("fixture: missing input '" + s.name + "'");
    xs.push_back(matrix_from_json(inputs.at(s.name), cfg.p));
  }
  if (inputs.size() != xs.size()) throw std::invalid_argument("fixture: unexpected extra inputs");
  detail::check_inputs(cfg, xs);
  return xs;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("'" + path + "': " + e.what());
  }
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

}  // namespace hopcirc::io
