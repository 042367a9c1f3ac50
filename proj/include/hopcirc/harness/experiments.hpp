#pragma once

#include "hopcirc/cot.hpp"
#include "hopcirc/harness/report.hpp"
#include "hopcirc/hopfield.hpp"
#include "hopcirc/problems.hpp"

#include <cmath>

namespace hopcirc::harness {

/// Euclidean distance, accumulated in extended precision.
inline double distance(const FpMatrix& a, const FpMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("distance: shape mismatch");
  ExtFloat s = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const ExtFloat t = to_ext(a.entries()[k]) - to_ext(b.entries()[k]);
    s += t * t;
  }
  return static_cast<double>(sqrt(s));
}

/// Column k of Xi plus a perturbation of length uniform in [0, radius] in a
/// uniformly random direction (before rounding to F_p).
inline FpMatrix near_query(const FpMatrix& Xi, std::size_t k, double radius, SplitMix64& rng) {
  const std::size_t d = Xi.rows();
  std::vector<double> u(d);
  double norm = 0;
  while (norm < 1e-9) {
    norm = 0;
    for (double& x : u) {
      x = gaussian(rng);
      norm += x * x;
    }
    norm = std::sqrt(norm);
  }
  const double r = radius * rng.unit();
  FpMatrix x(d, 1, Xi.precision());
  for (std::size_t i = 0; i < d; ++i) x(i, 0) = from_double(to_double(Xi(i, k)) + r * u[i] / norm, Xi.precision());
  return x;
}

/// Xi softmax(beta Xi^T x) on the exact values of the F_p operands, in
/// extended precision throughout (no F_p rounding).
inline std::vector<ExtFloat> retrieval_step_ext(const RetrievalInstance& inst) {
  inst.validate();
  const std::size_t d = inst.Xi.rows(), M = inst.M();
  const ExtFloat beta = to_ext(inst.beta);
  std::vector<ExtFloat> z(M);
  for (std::size_t j = 0; j < M; ++j) {
    ExtFloat s = 0;
    for (std::size_t i = 0; i < d; ++i) s += to_ext(inst.Xi(i, j)) * to_ext(inst.x(i, 0));
    z[j] = beta * s;
  }
  const ExtFloat top = *std::max_element(z.begin(), z.end());
  ExtFloat total = 0;
  for (auto& v : z) total += (v = exp(v - top));
  std::vector<ExtFloat> out(d, ExtFloat(0));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < M; ++j) out[i] += to_ext(inst.Xi(i, j)) * z[j] / total;
  }
  return out;
}

struct RetrievalTrial {
  double beta = 0;
  std::size_t trial = 0;
  std::size_t target = 0;
  double query_distance = 0;   // |x - xi_target|
  double distance = 0;         // |step(x) - xi_target|, F_p step
  double ext_distance = 0;     // same for the extended-precision step
  double error_vs_ext = 0;     // |F_p step - extended step|
  bool success = false;        // distance < threshold
};

/// One trial: fresh orthonormal patterns (columns), a random target, a query
/// near it, one retrieval step.
inline RetrievalTrial retrieval_trial(std::size_t d, std::size_t M, double beta, int p, SplitMix64& rng,
                                      const Tolerances& tol = {}) {
  RetrievalTrial t;
  t.beta = beta;
  const FpMatrix Xi = orthonormal_patterns(rng, d, M, p);
  t.target = rng.below(M);
  const FpMatrix xi = FpMatrix(d, 1, p, Xi.col(t.target));
  const RetrievalInstance inst{Xi, near_query(Xi, t.target, tol.retrieval_radius, rng), from_double(beta, p)};
  t.query_distance = distance(inst.x, xi);
  const FpMatrix out = retrieval_step(inst);
  const auto ext = retrieval_step_ext(inst);
  ExtFloat de = 0, dv = 0;
  for (std::size_t i = 0; i < d; ++i) {
    const ExtFloat a = ext[i] - to_ext(xi(i, 0)), b = ext[i] - to_ext(out(i, 0));
    de += a * a;
    dv += b * b;
  }
  t.distance = distance(out, xi);
  t.ext_distance = static_cast<double>(sqrt(de));
  t.error_vs_ext = static_cast<double>(sqrt(dv));
  t.success = t.distance < tol.retrieval_distance;
  return t;
}

struct ExperimentResult {
  std::string name;
  Table table;
  json summary;
  bool passed = true;  // false only when an experiment has something to fail
};

struct RetrievalSweepConfig {
  std::vector<double> betas{1, 8, 32};
  std::size_t trials = 100;
  std::size_t d = 8;
  std::size_t M = 4;
  int p = 24;
  std::uint64_t seed = 1;
};

/// Each beta draws from its own stream, so adding a beta leaves the others'
/// rows unchanged. Diagnostic: never fails.
inline ExperimentResult retrieval_sweep(const RetrievalSweepConfig& c, const Tolerances& tol = {}) {
  check_precision(c.p);
  if (c.M == 0 || c.M > c.d) throw std::invalid_argument("retrieval_sweep: need 1 <= M <= d");
  ExperimentResult r{"retrieval_sweep",
                     {{"beta", "trial", "target", "query_distance", "distance", "ext_distance", "error_vs_ext",
                       "success"}, {}},
                     json::array()};
  for (std::size_t b = 0; b < c.betas.size(); ++b) {
    if (!(c.betas[b] > 0)) throw std::invalid_argument("retrieval_sweep: beta must be positive");
    SplitMix64 rng(batch_seed(c.seed, b));
    std::size_t successes = 0;
    double worst = 0, worst_err = 0, mean_err = 0;
    for (std::size_t k = 0; k < c.trials; ++k) {
      RetrievalTrial t = retrieval_trial(c.d, c.M, c.betas[b], c.p, rng, tol);
      t.trial = k;
      successes += t.success;
      worst = std::max(worst, t.distance);
      worst_err = std::max(worst_err, t.error_vs_ext);
      mean_err += t.error_vs_ext / static_cast<double>(c.trials);
      r.table.rows.push_back({fmt(t.beta), std::to_string(k), std::to_string(t.target), fmt(t.query_distance),
                              fmt(t.distance), fmt(t.ext_distance), fmt(t.error_vs_ext), t.success ? "1" : "0"});
    }
    r.summary.push_back({{"beta", c.betas[b]},
                         {"trials", c.trials},
                         {"successes", successes},
                         {"max_distance", worst},
                         {"mean_error_vs_ext", mean_err},
                         {"max_error_vs_ext", worst_err}});
  }
  r.summary = {{"per_beta", r.summary}};
  return r;
}

struct EnergyTraceConfig {
  std::size_t d = 8;
  std::size_t M = 4;
  double beta = 8;
  int p = 24;
  std::size_t steps = 10;
  std::uint64_t seed = 1;
};

/// Energy along iterated retrieval from a random query over orthonormal
/// patterns. The monotone column flags steps whose energy rose by more than
/// the tolerance; it is reported, never enforced.
inline ExperimentResult energy_trace(const EnergyTraceConfig& c, const Tolerances& tol = {}) {
  check_precision(c.p);
  if (c.M == 0 || c.M > c.d) throw std::invalid_argument("energy_trace: need 1 <= M <= d");
  if (!(c.beta > 0)) throw std::invalid_argument("energy_trace: beta must be positive");
  SplitMix64 rng(c.seed);
  RetrievalInstance inst{orthonormal_patterns(rng, c.d, c.M, c.p), random_matrix(rng, c.d, 1, c.p),
                         from_double(c.beta, c.p)};
  ExperimentResult r{"energy_trace", {{"step", "energy", "delta", "monotone"}, {}}, {}};
  double prev = to_double(energy(inst));
  r.table.rows.push_back({"0", fmt(prev), "0", "1"});
  std::size_t increases = 0;
  for (std::size_t s = 1; s <= c.steps; ++s) {
    inst.x = retrieval_step(inst);
    const double e = to_double(energy(inst));
    const bool mono = e - prev <= tol.energy_step;
    increases += !mono;
    r.table.rows.push_back({std::to_string(s), fmt(e), fmt(e - prev), mono ? "1" : "0"});
    prev = e;
  }
  r.summary = {{"steps", c.steps}, {"increases", increases}, {"monotone", increases == 0}, {"final_energy", prev}};
  return r;
}

struct S5HarnessConfig {
  std::size_t instances = 100;
  std::size_t length = 8;
  std::size_t steps = 1;
  std::uint64_t seed = 1;
};

/// Runs the word-problem harness over alternating identity / non-identity
/// words. Diagnostic: accuracy is reported, not judged.
inline ExperimentResult s5_harness(const MhmParams& params, const S5HarnessConfig& c) {
  ExperimentResult r{"s5_harness", {{"index", "seed", "length", "label", "answer", "correct", "forward_passes"}, {}}, {}};
  std::size_t correct = 0, abstained = 0, positives = 0;
  const GenParams g{ProblemKind::s5_word, c.length, -1, false};
  for (std::size_t i = 0; i < c.instances; ++i) {
    const ProblemInstance inst = gen_instance(g, c.seed, i);
    const WordProblemResult w = run_word_problem(inst, params, c.steps);
    correct += w.correct;
    abstained += w.answer == Answer::abstain;
    positives += inst.label;
    r.table.rows.push_back({std::to_string(i), std::to_string(inst.seed), std::to_string(c.length),
                            inst.label ? "1" : "0", to_string(w.answer), w.correct ? "1" : "0",
                            std::to_string(w.forward_passes)});
  }
  const double n = static_cast<double>(std::max<std::size_t>(c.instances, 1));
  r.summary = {{"instances", c.instances},
               {"positives", positives},
               {"correct", correct},
               {"abstained", abstained},
               {"accuracy", static_cast<double>(correct) / n}};
  return r;
}

struct CrosscheckConfig {
  std::size_t count = 1000;
  std::uint64_t seed = 1;
};

/// Each problem's primary oracle against its alternate (union-find vs BFS,
/// AHU vs bijection search, left fold vs halving fold), plus the stored
/// label. Fails on any disagreement.
inline ExperimentResult oracle_crosscheck(const CrosscheckConfig& c) {
  ExperimentResult r{"oracle_crosscheck", {{"problem", "index", "size", "label", "primary", "alternate", "agree"}, {}}, {}};
  std::size_t mismatches = 0;
  json per = json::object();
  const auto row = [&](ProblemKind k, std::size_t i, std::size_t size, bool label, bool primary, bool alternate) {
    const bool agree = label == primary && primary == alternate;
    mismatches += !agree;
    auto& s = per[to_string(k)];
    if (s.is_null()) s = {{"checked", 0}, {"mismatches", 0}};
    s["checked"] = s["checked"].get<int>() + 1;
    s["mismatches"] = s["mismatches"].get<int>() + (agree ? 0 : 1);
    r.table.rows.push_back({to_string(k), std::to_string(i), std::to_string(size), label ? "1" : "0",
                            primary ? "1" : "0", alternate ? "1" : "0", agree ? "1" : "0"});
  };
  for (std::size_t i = 0; i < c.count; ++i) {
    const std::size_t n = 3 + i % 30;
    const auto inst = gen_instance({ProblemKind::connectivity, n, -1, false}, c.seed, i);
    const auto& g = std::get<ConnectivityInstance>(inst.payload);
    row(ProblemKind::connectivity, i, n, inst.label, oracle_connectivity(g), connected_bfs(g));
  }
  for (std::size_t i = 0; i < c.count; ++i) {
    const std::size_t n = 3 + i % 8;
    const bool colored = i % 3 == 0;
    const auto inst = gen_instance({ProblemKind::tree_iso, n, -1, colored}, c.seed, i);
    const auto& t = std::get<TreePair>(inst.payload);
    row(ProblemKind::tree_iso, i, n, inst.label, oracle_tree_iso(t.first, t.second),
        tree_iso_brute_force(t.first, t.second));
  }
  for (std::size_t i = 0; i < c.count; ++i) {
    const std::size_t n = 1 + i % 32;
    const auto inst = gen_instance({ProblemKind::s5_word, n, -1, false}, c.seed, i);
    const auto& w = std::get<std::vector<Perm5>>(inst.payload);
    row(ProblemKind::s5_word, i, n, inst.label, oracle_s5(w), compose_word_balanced(w, 0, w.size()).is_identity());
  }
  r.summary = {{"checked", r.table.rows.size()}, {"mismatches", mismatches}, {"per_problem", per}};
  r.passed = mismatches == 0;
  return r;
}

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"retrieval_sweep", "energy_trace", "s5_harness", "oracle_crosscheck"};
  return names;
}

}  // namespace hopcirc::harness
