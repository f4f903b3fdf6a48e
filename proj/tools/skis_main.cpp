#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "skis/errors.hpp"
#include "skis/evaluator.hpp"
#include "skis/graph.hpp"
#include "skis/maximizer.hpp"
#include "skis/oracle.hpp"
#include "skis/sketch.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitIncompatible = 4;

struct CommonOpts {
  std::string graph_path;
  std::string model = "ic";
  std::string weights = "given";
  std::uint64_t seed = 7;
  unsigned workers = 0;  // 0 = hardware parallelism
};

unsigned resolve_workers(unsigned w) {
  if (w > 0) return w;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

skis::ProbabilisticGraph load_graph(const CommonOpts& opts) {
  std::ifstream in(opts.graph_path);
  // A missing input file is an argument problem (exit 2), not an I/O failure.
  if (!in) throw skis::validation_error("cannot open graph file: " + opts.graph_path);
  return skis::load_edge_list(in, skis::model_from_string(opts.model),
                              skis::weight_mode_from_string(opts.weights), opts.seed);
}

std::vector<std::vector<std::uint32_t>> parse_seed_sets(
    const std::vector<std::string>& inline_sets, const std::string& file) {
  std::vector<std::vector<std::uint32_t>> sets;
  const auto parse_line = [&](const std::string& line) {
    std::istringstream ss(line);
    std::vector<std::uint32_t> set;
    long long v;
    while (ss >> v) {
      if (v < 0) throw skis::validation_error("negative node id");
      set.push_back(static_cast<std::uint32_t>(v));
      if (ss.peek() == ',') ss.ignore();
    }
    if (!set.empty()) sets.push_back(std::move(set));
  };
  for (const std::string& s : inline_sets) parse_line(s);
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw skis::validation_error("cannot open seed file: " + file);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line[0] != '#') parse_line(line);
    }
  }
  if (sets.empty()) throw skis::validation_error("no seed sets given");
  return sets;
}

json seeds_json(const std::vector<std::uint32_t>& seeds) {
  json a = json::array();
  for (auto v : seeds) a.push_back(v);
  return a;
}

int cmd_build(const CommonOpts& common, const std::string& kind_s,
              std::optional<double> h, std::optional<std::uint64_t> count,
              const std::string& out_path, const std::string& meta_path) {
  const auto t0 = std::chrono::steady_clock::now();
  const skis::ProbabilisticGraph graph = load_graph(common);
  const skis::GammaTable gamma = skis::compute_gamma(graph);
  const skis::SampleKind kind = skis::sample_kind_from_string(kind_s);
  skis::GrowthPolicy policy =
      count ? skis::GrowthPolicy::fixed_count(*count)
            : skis::GrowthPolicy::total_size_scaled(h.value_or(5.0), graph.node_count());
  const skis::Sketch sketch = skis::build_sketch(graph, gamma, kind, policy,
                                                 common.seed,
                                                 resolve_workers(common.workers));
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw skis::io_error("cannot open output file: " + out_path);
  skis::serialize_sketch(sketch, out);
  out.close();
  if (!out) throw skis::io_error("write failed: " + out_path);

  if (!meta_path.empty()) {
    std::ofstream meta(meta_path);
    if (!meta) throw skis::io_error("cannot open metadata file: " + meta_path);
    skis::write_metadata({graph.node_count(), graph.edge_count(),
                          graph.model(),
                          skis::weight_mode_from_string(common.weights), common.seed,
                          graph.content_hash()},
                         meta);
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  // Stats go to stderr: build_seconds varies run to run, stdout stays
  // byte-reproducible.
  json stats;
  stats["T"] = sketch.sample_count();
  stats["total_entries"] = sketch.total_entries();
  stats["Gamma"] = sketch.gamma_total;
  stats["build_seconds"] = secs;
  stats["bytes"] = sketch.memory_bytes();
  std::cerr << stats.dump() << '\n';
  return kExitOk;
}

int cmd_estimate(const std::string& sketch_path, const CommonOpts& common,
                 bool has_graph, const std::vector<std::string>& seeds_inline,
                 const std::string& seeds_file) {
  std::ifstream in(sketch_path, std::ios::binary);
  if (!in) throw skis::validation_error("cannot open sketch file: " + sketch_path);
  const skis::Sketch sketch = skis::deserialize_sketch(in);
  if (has_graph) {
    const skis::ProbabilisticGraph graph = load_graph(common);
    if (graph.content_hash() != sketch.graph_hash)
      throw skis::incompatible_error("sketch was built from a different graph");
  }
  for (const auto& seeds : parse_seed_sets(seeds_inline, seeds_file)) {
    const skis::Estimate est = skis::estimate_influence(sketch, seeds);
    json rec;
    rec["seed_set"] = seeds_json(seeds);
    rec["estimate"] = est.value;
    rec["coverage"] = est.coverage;
    rec["T"] = est.samples;
    rec["kind"] = skis::to_string(est.kind);
    rec["additive_term"] = est.additive_term;
    std::cout << rec.dump() << '\n';
  }
  return kExitOk;
}

int cmd_maximize(const CommonOpts& common, const std::string& algo,
                 const std::string& sketch_path, std::uint32_t k, double epsilon,
                 std::optional<double> delta, double lambda2) {
  json rec;
  rec["k"] = k;
  if (algo == "greedy") {
    if (sketch_path.empty())
      throw skis::validation_error("--algo greedy requires --sketch");
    std::ifstream in(sketch_path, std::ios::binary);
    if (!in) throw skis::validation_error("cannot open sketch file: " + sketch_path);
    const skis::Sketch sketch = skis::deserialize_sketch(in);
    const skis::GreedySolution sol = skis::greedy(sketch, k);
    rec["seeds"] = seeds_json(sol.seeds);
    rec["objective"] = sol.objective;
    rec["per_step_gains"] = sol.per_step_gains;
    rec["samples_used"] = sketch.sample_count();
    rec["iterations"] = k;
    rec["guarantee_flag"] = "fixed_sketch";
  } else if (algo == "dssa") {
    const skis::ProbabilisticGraph graph = load_graph(common);
    const skis::GammaTable gamma = skis::compute_gamma(graph);
    const double d = delta.value_or(1.0 / std::max(graph.node_count(), 2u));
    const skis::DssaResult res =
        skis::dssa_skis(graph, gamma, k, epsilon, d, common.seed,
                        resolve_workers(common.workers), lambda2);
    rec["seeds"] = seeds_json(res.seeds);
    rec["epsilon"] = res.epsilon;
    rec["delta"] = res.delta;
    rec["samples_used"] = res.samples_used;
    rec["iterations"] = res.iterations;
    rec["objective"] = res.objective;
    rec["guarantee_flag"] = res.guarantee_capped ? "guarantee-capped" : "ok";
  } else {
    throw skis::validation_error("unknown --algo '" + algo + "'");
  }
  std::cout << rec.dump() << '\n';
  return kExitOk;
}

int cmd_groundtruth(const CommonOpts& common, bool exact, double epsilon,
                    std::optional<double> delta,
                    const std::vector<std::string>& seeds_inline,
                    const std::string& seeds_file) {
  const skis::ProbabilisticGraph graph = load_graph(common);
  std::cout << "seed_set,method,value,epsilon,delta,samples_used\n";
  for (const auto& seeds : parse_seed_sets(seeds_inline, seeds_file)) {
    skis::TruthEstimate t;
    if (exact) {
      t = skis::exact_influence(graph, seeds);
    } else {
      const double d = delta.value_or(1.0 / std::max(graph.node_count(), 2u));
      t = skis::monte_carlo_influence(graph, seeds, epsilon, d, common.seed,
                                      resolve_workers(common.workers));
    }
    for (std::size_t i = 0; i < seeds.size(); ++i)
      std::cout << (i ? " " : "") << seeds[i];
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", t.value);
    std::cout << ',' << skis::to_string(t.method) << ',' << buf << ',' << t.epsilon
              << ',' << t.delta << ',' << t.samples_used << '\n';
  }
  return kExitOk;
}

int run(int argc, char** argv) {
  CLI::App app{"Influence estimation and maximization with importance-sampled "
               "reverse-cascade sketches"};
  app.require_subcommand(1);
  // --h is a real flag (sketch size factor), so help loses its short form.
  app.set_help_flag("--help", "print help and exit");
  CommonOpts common;

  const auto add_graph_opts = [&](CLI::App* cmd, bool required) {
    cmd->set_help_flag("--help", "print help and exit");
    auto* g = cmd->add_option("--graph", common.graph_path, "edge-list file");
    if (required) g->required();
    cmd->add_option("--model", common.model, "diffusion model: ic | lt");
    cmd->add_option("--weights", common.weights,
                    "weight mode: given | wc | tri | lt_random");
    cmd->add_option("--seed", common.seed, "RNG seed (default 7)");
    cmd->add_option("--workers", common.workers,
                    "worker threads (default: hardware parallelism)");
  };

  // build
  auto* build = app.add_subcommand("build", "build a sketch and write it to disk");
  std::string kind = "skis";
  std::optional<double> h;
  std::optional<std::uint64_t> count;
  std::string out_path = "sketch.bin";
  std::string meta_path;
  add_graph_opts(build, true);
  build->add_option("--kind", kind, "sketch kind: skis | ris");
  build->add_option("--h", h,
                    "stop when total sample size reaches ceil(h * n * ln n)");
  build->add_option("--count", count, "stop at an exact sample count");
  build->add_option("--out", out_path, "output sketch path");
  build->add_option("--meta", meta_path, "also write a graph metadata JSON");

  // estimate
  auto* estimate = app.add_subcommand("estimate", "answer influence queries");
  std::string sketch_path;
  std::vector<std::string> seeds_inline;
  std::string seeds_file;
  estimate->add_option("--sketch", sketch_path, "sketch file")->required();
  add_graph_opts(estimate, false);
  estimate->add_option("--seeds", seeds_inline,
                       "inline seed set, comma or space separated (repeatable)");
  estimate->add_option("--seed-file", seeds_file, "file with one seed set per line");

  // maximize
  auto* maximize = app.add_subcommand("maximize", "select a max-influence seed set");
  std::string algo = "dssa";
  std::uint32_t k = 1;
  double epsilon = 0.5;
  std::optional<double> delta;
  std::string max_sketch;
  add_graph_opts(maximize, false);
  maximize->add_option("--algo", algo, "greedy (needs --sketch) | dssa (needs --graph)");
  maximize->add_option("--sketch", max_sketch, "sketch file for --algo greedy");
  maximize->add_option("--k", k, "seed budget")->required();
  maximize->add_option("--epsilon", epsilon, "accuracy target (default 0.5)");
  maximize->add_option("--delta", delta, "failure probability (default 1/n)");
  double lambda2 = 0.0;
  maximize->add_option("--lambda2", lambda2,
                       "override the derived dssa coverage threshold");

  // groundtruth
  auto* gt = app.add_subcommand("groundtruth", "exact or Monte-Carlo influence");
  bool exact = false;
  double gt_eps = 0.005;
  std::optional<double> gt_delta;
  std::vector<std::string> gt_seeds;
  std::string gt_seed_file;
  add_graph_opts(gt, true);
  gt->add_flag("--exact", exact, "exhaustive live-edge enumeration");
  gt->add_option("--epsilon", gt_eps, "MC accuracy (default 0.005)");
  gt->add_option("--delta", gt_delta, "MC failure probability (default 1/n)");
  gt->add_option("--seeds", gt_seeds, "inline seed set (repeatable)");
  gt->add_option("--seed-file", gt_seed_file, "file with one seed set per line");

  // bench
  auto* bench = app.add_subcommand("bench", "estimation / maximization benchmarks");
  bench->set_help_flag("--help", "print help and exit");
  bench->require_subcommand(1);
  auto* bench_ie_cmd = bench->add_subcommand("ie", "estimation-error benchmark");
  skis::BenchIeConfig ie_cfg;
  std::vector<double> ie_h;
  std::vector<std::uint32_t> ie_sizes;
  std::vector<std::string> ie_kinds;
  add_graph_opts(bench_ie_cmd, true);
  bench_ie_cmd->add_option("--h", ie_h, "sketch size factors (default 5 10)");
  bench_ie_cmd->add_option("--sizes", ie_sizes, "seed-set sizes (default 1 100 1000)");
  bench_ie_cmd->add_option("--kinds", ie_kinds, "sketch kinds (default skis ris)");
  bench_ie_cmd->add_option("--queries", ie_cfg.query_count, "queries per size");
  bench_ie_cmd->add_option("--mc-epsilon", ie_cfg.mc_epsilon, "truth MC accuracy");
  bench_ie_cmd->add_option("--mc-delta", ie_cfg.mc_delta, "truth MC delta (default 1/n)");

  auto* bench_im_cmd = bench->add_subcommand("im", "seed-selection benchmark");
  skis::BenchImConfig im_cfg;
  std::vector<std::uint64_t> im_budgets;
  std::vector<std::uint32_t> im_k;
  std::vector<std::string> im_algos;
  bool no_timing = false;
  add_graph_opts(bench_im_cmd, true);
  bench_im_cmd->add_option("--budgets", im_budgets,
                           "sample budgets (default 1000 10000 100000)");
  bench_im_cmd->add_option("--k", im_k, "seed budgets (default 10 50)");
  bench_im_cmd->add_option("--algos", im_algos,
                           "greedy_skis | greedy_ris | dssa_skis (repeatable)");
  bench_im_cmd->add_option("--trials", im_cfg.trials, "trials per configuration");
  bench_im_cmd->add_option("--eval-epsilon", im_cfg.eval_epsilon,
                           "re-evaluation MC accuracy");
  bench_im_cmd->add_option("--eval-delta", im_cfg.eval_delta,
                           "re-evaluation MC delta (default 1/n)");
  bench_im_cmd->add_option("--dssa-epsilon", im_cfg.dssa_epsilon, "dssa accuracy");
  bench_im_cmd->add_flag("--no-timing", no_timing,
                         "zero the runtime column for byte-reproducible output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (build->parsed()) {
      if (h && count)
        throw skis::validation_error("--h and --count are mutually exclusive");
      return cmd_build(common, kind, h, count, out_path, meta_path);
    }
    if (estimate->parsed()) {
      return cmd_estimate(sketch_path, common, !common.graph_path.empty(),
                          seeds_inline, seeds_file);
    }
    if (maximize->parsed()) {
      return cmd_maximize(common, algo, max_sketch, k, epsilon, delta, lambda2);
    }
    if (gt->parsed()) {
      return cmd_groundtruth(common, exact, gt_eps, gt_delta, gt_seeds, gt_seed_file);
    }
    if (bench->parsed()) {
      const skis::ProbabilisticGraph graph = load_graph(common);
      const skis::GammaTable gamma = skis::compute_gamma(graph);
      if (bench_ie_cmd->parsed()) {
        if (!ie_h.empty()) ie_cfg.h_values = ie_h;
        if (!ie_sizes.empty()) ie_cfg.set_sizes = ie_sizes;
        if (!ie_kinds.empty()) {
          ie_cfg.kinds.clear();
          for (const auto& s : ie_kinds)
            ie_cfg.kinds.push_back(skis::sample_kind_from_string(s));
        }
        ie_cfg.seed = common.seed;
        ie_cfg.workers = resolve_workers(common.workers);
        skis::bench_ie(graph, gamma, ie_cfg, std::cout);
        return kExitOk;
      }
      if (!im_budgets.empty()) im_cfg.budgets = im_budgets;
      if (!im_k.empty()) im_cfg.k_values = im_k;
      if (!im_algos.empty()) {
        im_cfg.algos.clear();
        for (const auto& s : im_algos)
          im_cfg.algos.push_back(skis::im_algo_from_string(s));
      }
      im_cfg.seed = common.seed;
      im_cfg.workers = resolve_workers(common.workers);
      im_cfg.timing = !no_timing;
      skis::bench_im(graph, gamma, im_cfg, std::cout);
      return kExitOk;
    }
  } catch (const skis::incompatible_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIncompatible;
  } catch (const skis::io_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const skis::error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
