#include "hopcirc/circuit/netlist.hpp"
#include "hopcirc/harness/experiments.hpp"
#include "hopcirc/io/json.hpp"
#include "hopcirc/lowering.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace hopcirc;
using harness::json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failed = 1;
constexpr int exit_usage = 2;

/// Raised for bad arguments or unusable input files; maps to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string resolve(const std::string& path) {
  return path.empty() ? path : std::filesystem::absolute(path).lexically_normal().string();
}

json load(const std::string& path) {
  try {
    return io::read_json_file(path);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
}

void emit(const json& report, const std::string& path) {
  if (path.empty()) {
    std::cout << report.dump(2) << "\n";
  } else {
    io::write_json_file(path, report);
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << text;
}

// --- construct configuration shared by compile / verify / depth ------------

struct ConfigOptions {
  std::string file;
  std::string construct;
  std::size_t n = 2, d = 2, m = 1, d_phi = 0;
  int p = 4;
  std::string normalization = "beta_rowsum";
  std::string component = "fnn";
  std::vector<CLI::Option*> flags;

  void add(CLI::App* app) {
    app->add_option("--config", file, "Construct configuration JSON (flags override its fields)");
    flags = {app->add_option("--construct", construct, "matmul, attn, hop_layer, fnn, mhn, kattn, khop or khn"),
             app->add_option("--n", n, "Rows of the query / input matrix"),
             app->add_option("--d", d, "Model width"),
             app->add_option("--m", m, "Layers (mhn, khn)"),
             app->add_option("--d-phi", d_phi, "Feature width of kernel constructs (0: d)"),
             app->add_option("--p", p, "Significand bits"),
             app->add_option("--normalization", normalization, "beta_rowsum or softmax"),
             app->add_option("--component", component, "fnn or identity (mhn, khn)")};
  }

  bool any_flag() const {
    return std::any_of(flags.begin(), flags.end(), [](const CLI::Option* o) { return o->count() > 0; });
  }

  /// Starts from `base` (a config file, or a fixture's embedded config) and
  /// applies the flags given on the command line.
  ConstructConfig resolve(const json* base = nullptr) const {
    json j = base ? *base : json::object();
    if (!file.empty()) j = load(file);
    const char* keys[] = {"construct", "n", "d", "m", "d_phi", "p", "normalization", "component"};
    const json values[] = {construct, n, d, m, d_phi, p, normalization, component};
    for (std::size_t i = 0; i < flags.size(); ++i) {
      if (flags[i]->count() || !j.contains(keys[i])) j[keys[i]] = values[i];
    }
    if (j["construct"].get<std::string>().empty()) throw UsageError("no construct given (--construct or --config)");
    try {
      return io::config_from_json(j);
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
  }
};

json depth_json(const LoweredArtifact& a, const ConstructConfig& cfg) {
  const Measurement ms = measure(a.circuit);
  const DepthFormula f = depth_formula(cfg);
  json j = {{"measured_depth", to_string(ms.symbolic_depth)},
            {"formula", to_string(f.value)},
            {"verdict", ms.symbolic_depth == f.value ? "PASS" : "FAIL"},
            {"size", ms.size},
            {"concrete_depth", ms.concrete_depth},
            {"macro_gates", a.circuit.macros.size()}};
  if (f.alternate) {
    j["known_discrepancy"] = {{"alternate_formula", to_string(*f.alternate)}, {"note", f.note}};
  }
  return j;
}

// --- compile ---------------------------------------------------------------

struct CompileCmd {
  ConfigOptions cfg;
  std::string out = "netlist.txt";
  std::string report;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("compile", "Lower a construct to a threshold circuit and report its depth");
    cfg.add(c);
    c->add_option("--out", out, "Netlist path");
    c->add_option("--report", report, "Report path (default: stdout)");
    c->callback([this] { code = run(); });
  }

  int code = exit_ok;

  int run() {
    const ConstructConfig config = cfg.resolve();
    const LoweredArtifact a = lower_construct(config);
    write_text(out, to_netlist(a.circuit));
    json r = harness::report_header("compile", io::config_to_json(config), {});
    r["netlist"] = resolve(out);
    r["depth"] = depth_json(a, config);
    emit(r, report);
    if (!report.empty()) {
      std::cerr << to_string(config.construct) << ": " << r["depth"]["measured_depth"].get<std::string>() << " vs "
                << r["depth"]["formula"].get<std::string>() << " -> " << r["depth"]["verdict"].get<std::string>()
                << "\n";
    }
    return r["depth"]["verdict"] == "PASS" ? exit_ok : exit_failed;
  }
};

// --- verify ----------------------------------------------------------------

struct VerifyCmd {
  ConfigOptions cfg;
  std::string netlist, inputs, report;
  std::size_t random = 0;
  std::uint64_t seed = 1;
  int code = exit_ok;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("verify", "Check a netlist against the reference forward pass, bit for bit");
    cfg.add(c);
    c->add_option("--netlist", netlist, "Netlist to check (default: a fresh compile)");
    auto* in = c->add_option("--inputs", inputs, "Fixture JSON {config, inputs}");
    auto* rnd = c->add_option("--random", random, "Number of random inputs instead of a fixture");
    in->excludes(rnd);
    c->add_option("--seed", seed, "Seed for --random");
    c->add_option("--report", report, "Report path (default: stdout)");
    c->callback([this] { code = run(); });
  }

  int run() {
    if (inputs.empty() && random == 0) throw UsageError("verify: give --inputs or --random N");
    std::optional<json> fixture;
    if (!inputs.empty()) fixture = load(inputs);
    const json* embedded = fixture && fixture->contains("config") ? &fixture->at("config") : nullptr;
    const ConstructConfig config = cfg.resolve(embedded);

    std::vector<std::vector<FpMatrix>> cases;
    if (fixture) {
      try {
        cases.push_back(io::fixture_inputs(*fixture, config));
      } catch (const std::exception& e) {
        throw UsageError(e.what());
      }
    } else {
      SplitMix64 rng(seed);
      for (std::size_t k = 0; k < random; ++k) cases.push_back(random_construct_inputs(config, rng));
    }

    LoweredArtifact a;
    if (netlist.empty()) {
      a = lower_construct(config);
    } else {
      std::ifstream is(netlist);
      if (!is) throw UsageError("cannot open '" + netlist + "'");
      a = artifact_for(config, read_netlist(is));
    }

    json r = harness::report_header("verify", io::config_to_json(config), fixture ? std::vector<std::uint64_t>{}
                                                                                  : std::vector<std::uint64_t>{seed});
    r["netlist"] = netlist.empty() ? json("fresh compile") : json(resolve(netlist));
    r["inputs"] = fixture ? json(resolve(inputs)) : json("random");
    json rows = json::array();
    std::size_t passed = 0, undefined = 0;
    for (std::size_t k = 0; k < cases.size(); ++k) {
      const EquivalenceReport e = verify_equivalence(a, config, cases[k]);
      const bool ok = e.agrees() && (e.error.empty() || e.reference_undefined);
      passed += ok;
      undefined += e.reference_undefined && e.circuit_undefined;
      json row = {{"input", k}, {"verdict", ok ? "PASS" : "FAIL"}, {"detail", to_string(e)}};
      if (e.fault_gate) {
        row["fault_gate"] = *e.fault_gate;
        row["fault_region"] = e.fault_region;
      }
      if (!e.failed_macros.empty()) row["failed_macros"] = e.failed_macros;
      if (!ok) std::cerr << "input " << k << ": FAIL  " << to_string(e) << "\n";
      rows.push_back(std::move(row));
      if (k == 0) r["depth"] = {{"measured_depth", to_string(e.measured_depth)},
                                {"formula", to_string(e.formula.value)},
                                {"verdict", e.depth_matches ? "PASS" : "FAIL"}};
    }
    r["results"] = rows;
    r["summary"] = {{"checked", cases.size()},
                    {"passed", passed},
                    {"both_undefined", undefined},
                    {"verdict", passed == cases.size() ? "PASS" : "FAIL"}};
    std::cerr << "verify " << to_string(config.construct) << ": " << passed << "/" << cases.size() << " inputs "
              << (passed == cases.size() ? "PASS" : "FAIL") << "\n";
    emit(r, report);
    return passed == cases.size() ? exit_ok : exit_failed;
  }
};

// --- depth -----------------------------------------------------------------

struct DepthCmd {
  ConfigOptions cfg;
  std::string netlist;
  int code = exit_ok;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("depth", "Measure symbolic depth of a construct or of a netlist file");
    cfg.add(c);
    c->add_option("--netlist", netlist, "Measure this netlist instead of compiling");
    c->callback([this] { code = run(); });
  }

  int run() {
    if (!netlist.empty() && !cfg.any_flag() && cfg.file.empty()) {
      std::ifstream is(netlist);
      if (!is) throw UsageError("cannot open '" + netlist + "'");
      const Measurement ms = measure(read_netlist(is));
      std::cout << json{{"netlist", resolve(netlist)},
                        {"measured_depth", to_string(ms.symbolic_depth)},
                        {"size", ms.size},
                        {"concrete_depth", ms.concrete_depth}}
                       .dump(2)
                << "\n";
      return exit_ok;
    }
    const ConstructConfig config = cfg.resolve();
    LoweredArtifact a;
    if (netlist.empty()) {
      a = lower_construct(config);
    } else {
      std::ifstream is(netlist);
      if (!is) throw UsageError("cannot open '" + netlist + "'");
      a = artifact_for(config, read_netlist(is));
    }
    json r = depth_json(a, config);
    r["construct"] = to_string(config.construct);
    std::cout << r.dump(2) << "\n";
    return r["verdict"] == "PASS" ? exit_ok : exit_failed;
  }
};

// --- report: depth fidelity across all constructs --------------------------

struct ReportCmd {
  std::size_t max_m = 4;
  int p = 4;
  std::string out, csv;
  int code = exit_ok;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("report", "Depth-formula table for every construct (networks for m = 1..max-m)");
    c->add_option("--max-m", max_m, "Largest layer count for mhn and khn")->check(CLI::Range(1, 16));
    c->add_option("--p", p, "Precision used for the lowering");
    c->add_option("--out", out, "JSON report path (default: stdout)");
    c->add_option("--csv", csv, "Also write the table as CSV");
    c->callback([this] { code = run(); });
  }

  int run() {
    harness::Table t{{"construct", "m", "measured", "formula", "verdict", "alternate", "size"}, {}};
    json rows = json::array();
    std::size_t failed = 0;
    for (Construct c : all_constructs()) {
      const std::size_t ms = is_network(c) ? max_m : 1;
      for (std::size_t m = 1; m <= ms; ++m) {
        ConstructConfig cfg;
        cfg.construct = c;
        cfg.m = m;
        cfg.p = p;
        cfg.validate();
        const json d = depth_json(lower_construct(cfg), cfg);
        failed += d["verdict"] != "PASS";
        const std::string alt = d.contains("known_discrepancy") ? d["known_discrepancy"]["alternate_formula"].get<std::string>() : "";
        t.rows.push_back({to_string(c), std::to_string(m), d["measured_depth"], d["formula"], d["verdict"], alt,
                          std::to_string(d["size"].get<std::size_t>())});
        json row = d;
        row["construct"] = to_string(c);
        row["m"] = m;
        rows.push_back(row);
        std::cerr << to_string(c) << (is_network(c) ? " m=" + std::to_string(m) : "") << ": " << t.rows.back()[2]
                  << (d["verdict"] == "PASS" ? " = " : " != ") << t.rows.back()[3] << "\n";
      }
    }
    json r = harness::report_header("report", {{"max_m", max_m}, {"p", p}}, {});
    r["rows"] = rows;
    r["summary"] = {{"checked", rows.size()}, {"failed", failed}, {"verdict", failed ? "FAIL" : "PASS"}};
    if (!csv.empty()) {
      std::ofstream os(csv);
      if (!os) throw UsageError("cannot write '" + csv + "'");
      harness::write_csv(os, t);
    }
    emit(r, out);
    return failed ? exit_failed : exit_ok;
  }
};

// --- gen -------------------------------------------------------------------

struct GenCmd {
  std::string problem;
  std::size_t size = 6, count = 1;
  std::uint64_t seed = 1;
  std::string positive = "alternate";
  bool colored = false;
  std::string out;
  int code = exit_ok;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("gen", "Generate labelled problem instances");
    c->add_option("--problem", problem, "connectivity, tree_iso or s5_word")->required();
    c->add_option("--size", size, "Vertices, tree nodes or word length");
    c->add_option("--count", count, "Number of instances");
    c->add_option("--seed", seed, "Batch seed");
    c->add_option("--positive", positive, "yes, no or alternate")
        ->check(CLI::IsMember({"yes", "no", "alternate"}));
    c->add_flag("--colored", colored, "Colored trees (tree_iso)");
    c->add_option("--out", out, "Output path (default: stdout)");
    c->callback([this] { code = run(); });
  }

  int run() {
    GenParams g;
    try {
      g.kind = parse_problem_kind(problem);
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
    g.size = size;
    g.positive = positive == "alternate" ? -1 : positive == "yes";
    g.colored = colored;
    json instances = json::array();
    for (std::size_t i = 0; i < count; ++i) {
      try {
        instances.push_back(to_json(gen_instance(g, seed, i)));
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
    }
    json r = harness::report_header(
        "gen", {{"problem", problem}, {"size", size}, {"count", count}, {"positive", positive}, {"colored", colored}},
        {seed});
    r["instances"] = instances;
    emit(r, out);
    return exit_ok;
  }
};

// --- retrieve --------------------------------------------------------------

struct RetrieveCmd {
  std::string instance;
  std::size_t d = 8, M = 4, steps = 1;
  double beta = 32, radius = 0.1;
  int p = 24;
  std::uint64_t seed = 1;
  std::string out;
  int code = exit_ok;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("retrieve", "Run retrieval steps from a query (file or random near-pattern query)");
    c->add_option("--instance", instance, "JSON {p, Xi, x, beta}; patterns are the columns of Xi");
    c->add_option("--d", d, "Pattern dimension (random instance)");
    c->add_option("--M", M, "Number of orthonormal patterns (random instance)");
    c->add_option("--beta", beta, "Inverse temperature (random instance)");
    c->add_option("--p", p, "Precision (random instance)");
    c->add_option("--radius", radius, "Query distance bound from its pattern (random instance)");
    c->add_option("--seed", seed, "Seed (random instance)");
    c->add_option("--steps", steps, "Retrieval steps")->check(CLI::Range(1, 1000));
    c->add_option("--out", out, "Report path (default: stdout)");
    c->callback([this] { code = run(); });
  }

  int run() {
    RetrievalInstance inst;
    std::optional<std::size_t> target;
    json config;
    if (!instance.empty()) {
      const json j = load(instance);
      try {
        const int ip = j.at("p").get<int>();
        inst = {io::matrix_from_json(j.at("Xi"), ip), io::matrix_from_json(j.at("x"), ip),
                io::fp_from_json(j.at("beta"), ip)};
        inst.validate();
      } catch (const std::exception& e) {
        throw UsageError(std::string("instance: ") + e.what());
      }
      config = {{"instance", resolve(instance)}, {"steps", steps}};
    } else {
      if (M == 0 || M > d) throw UsageError("retrieve: need 1 <= M <= d");
      if (!(beta > 0)) throw UsageError("retrieve: beta must be positive");
      try {
        check_precision(p);
      } catch (const std::exception& e) {
        throw UsageError(e.what());
      }
      SplitMix64 rng(seed);
      inst.Xi = orthonormal_patterns(rng, d, M, p);
      target = rng.below(M);
      inst.x = harness::near_query(inst.Xi, *target, radius, rng);
      inst.beta = from_double(beta, p);
      config = {{"d", d}, {"M", M}, {"beta", beta}, {"p", p}, {"radius", radius}, {"steps", steps}};
    }
    const int ip = inst.x.precision();
    harness::Tolerances tol;
    tol.retrieval_radius = radius;
    json r = harness::report_header("retrieve", config, instance.empty() ? std::vector<std::uint64_t>{seed}
                                                                         : std::vector<std::uint64_t>{},
                                    tol);
    json trace = json::array();
    FpMatrix x = inst.x;
    const auto nearest = [&](const FpMatrix& v) {
      std::size_t best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < inst.M(); ++k) {
        const double dd = harness::distance(v, FpMatrix(inst.Xi.rows(), 1, ip, inst.Xi.col(k)));
        if (dd < bd) {
          bd = dd;
          best = k;
        }
      }
      return std::pair{best, bd};
    };
    for (std::size_t s = 0; s <= steps; ++s) {
      if (s > 0) x = retrieval_step({inst.Xi, x, inst.beta});
      const auto [k, dist] = nearest(x);
      json row = {{"step", s}, {"nearest_pattern", k}, {"distance", dist}};
      if (x.cols() == 1) row["energy"] = to_double(energy({inst.Xi, x, inst.beta}));
      trace.push_back(row);
    }
    r["trace"] = trace;
    if (target) r["target"] = *target;
    r["result"] = io::matrix_to_json(x);
    if (target) {
      const double dist = harness::distance(x, FpMatrix(inst.Xi.rows(), 1, ip, inst.Xi.col(*target)));
      r["verdict"] = dist < tol.retrieval_distance ? "PASS" : "FAIL";
    }
    emit(r, out);
    return exit_ok;
  }
};

// --- cot-run ---------------------------------------------------------------

struct CotCmd {
  std::string params, instance, tokens, save_params, out;
  std::size_t steps = 1;
  bool random_params = false;
  std::size_t d = 8, layers = 1, n_max = 32;
  int p = 8;
  std::uint64_t seed = 1;
  int code = exit_ok;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("cot-run", "Generate tokens with a Hopfield decoder (chain of thought)");
    auto* pf = c->add_option("--params", params, "Model JSON");
    auto* rp = c->add_flag("--random-params", random_params, "Random S5 answer model instead of --params");
    pf->excludes(rp);
    c->add_option("--instance", instance, "Problem instance JSON (as written by gen; first instance used)");
    c->add_option("--tokens", tokens, "Space-separated prompt instead of --instance");
    c->add_option("--steps", steps, "Tokens to generate")->check(CLI::Range(1, 100000));
    c->add_option("--d", d, "Width (random model)");
    c->add_option("--layers", layers, "Layers (random model)");
    c->add_option("--n-max", n_max, "Positions (random model)");
    c->add_option("--p", p, "Precision (random model)");
    c->add_option("--seed", seed, "Seed (random model)");
    c->add_option("--save-params", save_params, "Write the model used to this path");
    c->add_option("--out", out, "Report path (default: stdout)");
    c->callback([this] { code = run(); });
  }

  int run() {
    if (params.empty() && !random_params) throw UsageError("cot-run: give --params or --random-params");
    if (instance.empty() == tokens.empty()) throw UsageError("cot-run: give exactly one of --instance, --tokens");
    MhmParams model;
    try {
      if (random_params) {
        SplitMix64 rng(seed);
        model = random_s5_answer_params(d, layers, n_max, p, rng);
      } else {
        model = io::mhm_from_json(load(params));
      }
    } catch (const UsageError&) {
      throw;
    } catch (const std::exception& e) {
      throw UsageError(std::string("model: ") + e.what());
    }
    if (!save_params.empty()) io::write_json_file(save_params, io::mhm_to_json(model));

    std::optional<ProblemInstance> inst;
    std::vector<std::string> prompt;
    if (!instance.empty()) {
      json j = load(instance);
      if (j.contains("instances")) {
        if (j["instances"].empty()) throw UsageError("instance file holds no instances");
        j = j["instances"][0];
      }
      try {
        inst = instance_from_json(j);
      } catch (const std::exception& e) {
        throw UsageError(std::string("instance: ") + e.what());
      }
      prompt = inst->tokens;
    } else {
      std::istringstream is(tokens);
      for (std::string t; is >> t;) prompt.push_back(t);
    }
    for (const auto& t : prompt) {
      try {
        model.token_index(t);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
    }
    if (prompt.empty() || prompt.size() + steps > model.n_max() - 1) {
      throw UsageError("prompt length + steps must be at most n_max - 1 = " + std::to_string(model.n_max() - 1));
    }

    json config = {{"steps", steps}, {"prompt_length", prompt.size()}};
    config["params"] = random_params ? json{{"random", true}, {"d", d}, {"layers", layers}, {"n_max", n_max}, {"p", p}}
                                     : json(resolve(params));
    json r = harness::report_header("cot-run", config, random_params ? std::vector<std::uint64_t>{seed}
                                                                     : std::vector<std::uint64_t>{});
    const CotResult cot = cot_generate(prompt, model, steps);
    r["prompt"] = prompt;
    r["generated"] = cot.generated;
    r["forward_passes"] = cot.forward_passes;
    if (inst && inst->kind == ProblemKind::s5_word) {
      const WordProblemResult w = run_word_problem(*inst, model, steps);
      r["label"] = w.label;
      r["answer"] = to_string(w.answer);
      r["correct"] = w.correct;
    }
    emit(r, out);
    return exit_ok;
  }
};

// --- experiment ------------------------------------------------------------

struct ExperimentCmd {
  std::string name, out_dir = ".", params;
  std::uint64_t seed = 1;
  std::size_t trials = 100, count = 1000, instances = 100, length = 8, steps = 10;
  std::vector<double> betas{1, 8, 32};
  double beta = 8;
  int p = 24;
  harness::Tolerances tol;
  int code = exit_ok;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("experiment", "Run a named experiment; writes <name>.csv and <name>.json");
    c->add_option("name", name, "retrieval_sweep, energy_trace, s5_harness or oracle_crosscheck")
        ->required()
        ->check(CLI::IsMember(harness::experiment_names()));
    c->add_option("--seed", seed, "Seed");
    c->add_option("--out-dir", out_dir, "Directory for the CSV and JSON outputs");
    c->add_option("--trials", trials, "Trials per beta (retrieval_sweep)");
    c->add_option("--betas", betas, "Inverse temperatures (retrieval_sweep)")->delimiter(',');
    c->add_option("--beta", beta, "Inverse temperature (energy_trace)");
    c->add_option("--p", p, "Precision (retrieval_sweep, energy_trace)");
    c->add_option("--steps", steps, "Retrieval steps (energy_trace) or generated tokens (s5_harness; default 1)");
    c->add_option("--count", count, "Instances per problem (oracle_crosscheck)");
    c->add_option("--instances", instances, "Words (s5_harness)");
    c->add_option("--length", length, "Word length (s5_harness)");
    c->add_option("--params", params, "Model JSON (s5_harness; default: random answer model)");
    c->add_option("--radius", tol.retrieval_radius, "Query radius (retrieval_sweep)");
    c->add_option("--retrieval-distance", tol.retrieval_distance, "Success threshold (retrieval_sweep)");
    c->add_option("--energy-step", tol.energy_step, "Allowed energy increase per step (energy_trace)");
    steps_opt = c->get_option("--steps");
    c->callback([this] { code = run(); });
  }

  CLI::Option* steps_opt = nullptr;

  int run() {
    harness::ExperimentResult res;
    json config = {{"experiment", name}};
    try {
      if (name == "retrieval_sweep") {
        harness::RetrievalSweepConfig c{betas, trials, 8, 4, p, seed};
        config.update({{"betas", betas}, {"trials", trials}, {"d", c.d}, {"M", c.M}, {"p", p}});
        res = harness::retrieval_sweep(c, tol);
      } else if (name == "energy_trace") {
        harness::EnergyTraceConfig c{8, 4, beta, p, steps, seed};
        config.update({{"d", c.d}, {"M", c.M}, {"beta", beta}, {"p", p}, {"steps", steps}});
        res = harness::energy_trace(c, tol);
      } else if (name == "s5_harness") {
        const std::size_t gen_steps = steps_opt->count() ? steps : 1;
        MhmParams model;
        if (params.empty()) {
          SplitMix64 rng(seed);
          model = random_s5_answer_params(8, 1, length + gen_steps + 1, 8, rng);
        } else {
          model = io::mhm_from_json(load(params));
        }
        config.update({{"instances", instances}, {"length", length}, {"steps", gen_steps},
                       {"params", params.empty() ? json("random") : json(resolve(params))}});
        res = harness::s5_harness(model, {instances, length, gen_steps, seed});
      } else {
        config.update({{"count", count}});
        res = harness::oracle_crosscheck({count, seed});
      }
    } catch (const UsageError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    std::filesystem::create_directories(out_dir);
    const std::string base = (std::filesystem::path(out_dir) / name).string();
    {
      std::ofstream os(base + ".csv");
      if (!os) throw UsageError("cannot write '" + base + ".csv'");
      harness::write_csv(os, res.table);
    }
    json r = harness::report_header("experiment", config, {seed}, tol);
    r["rows_csv"] = resolve(base + ".csv");
    r["summary"] = res.summary;
    r["verdict"] = res.passed ? "PASS" : "FAIL";
    io::write_json_file(base + ".json", r);
    std::cout << r.dump(2) << "\n";
    return res.passed ? exit_ok : exit_failed;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Threshold-circuit lowering and analysis of Hopfield networks over F_p"};
  app.set_version_flag("--version", harness::tool_version);
  app.require_subcommand(1);

  CompileCmd compile;
  VerifyCmd verify;
  DepthCmd depth;
  GenCmd gen;
  RetrieveCmd retrieve;
  CotCmd cot;
  ExperimentCmd experiment;
  ReportCmd report;
  compile.add(app);
  verify.add(app);
  depth.add(app);
  gen.add(app);
  retrieve.add(app);
  cot.add(app);
  experiment.add(app);
  report.add(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_failed;
  }
  for (int code : {compile.code, verify.code, depth.code, gen.code, retrieve.code, cot.code, experiment.code,
                   report.code}) {
    if (code != exit_ok) return code;
  }
  return exit_ok;
}
