#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "skis/graph.hpp"
#include "skis/rng.hpp"
#include "skis/sketch.hpp"

namespace skis {

enum class TruthMethod : std::uint8_t { Exact = 0, McStoppingRule = 1 };

const char* to_string(TruthMethod m);

struct TruthEstimate {
  double value = 0.0;
  TruthMethod method = TruthMethod::Exact;
  double epsilon = 0.0;  // 0 for Exact
  double delta = 0.0;    // 0 for Exact
  std::uint64_t samples_used = 0;
};

/// Exhaustive live-edge enumeration. IC enumerates all 2^m edge outcomes
/// (m <= 22); LT enumerates per-node picks (prod (d_in + 1) <= 2^22).
TruthEstimate exact_influence(const ProbabilisticGraph& graph,
                              std::span<const std::uint32_t> seed_set);

/// True when the instance fits the exact enumeration limits.
bool exact_influence_feasible(const ProbabilisticGraph& graph);

/// The stopping-rule target: 4 (e - 2) ln(2/delta) / eps^2.
double mc_stopping_threshold(double epsilon, double delta);

/// Forward-cascade Monte Carlo with the stopping rule: draw cascades until
/// sum(W_j / n) >= mc_stopping_threshold(eps, delta), return the scaled mean.
/// Deterministic for a fixed seed regardless of worker count.
TruthEstimate monte_carlo_influence(const ProbabilisticGraph& graph,
                                    std::span<const std::uint32_t> seed_set,
                                    double epsilon, double delta,
                                    std::uint64_t base_seed, unsigned worker_count);

/// |estimate - truth| / max(truth, estimate) * 100; both zero -> 0.
double relative_difference(double estimate, double truth);

/// Forward diffusion simulator with reusable scratch; one per worker.
class ForwardSimulator {
 public:
  explicit ForwardSimulator(const ProbabilisticGraph& graph);
  /// Number of nodes active at the end of one simulated cascade from S.
  std::uint32_t cascade_size(std::span<const std::uint32_t> seed_set, RngStream& rng);

 private:
  const ProbabilisticGraph* graph_;
  std::vector<std::uint32_t> active_epoch_;
  std::vector<std::uint32_t> exposed_epoch_;  // LT: threshold drawn
  std::vector<double> threshold_;
  std::vector<double> pressure_;  // LT: accumulated in-weight
  std::uint32_t epoch_ = 0;
  std::vector<std::uint32_t> frontier_;
};

struct BenchIeConfig {
  std::vector<SampleKind> kinds{SampleKind::SKIS, SampleKind::RIS};
  std::vector<double> h_values{5.0, 10.0};
  std::vector<std::uint32_t> set_sizes{1, 100, 1000};
  std::uint32_t query_count = 20;
  double mc_epsilon = 0.005;
  double mc_delta = 0.0;  // 0 -> 1/n
  std::uint64_t seed = 7;
  unsigned workers = 1;
};

/// Estimation-quality benchmark: random seed sets per size, estimates from
/// each sketch configuration against exact truth when feasible (Monte Carlo
/// otherwise). Emits query rows, per-config aggregates, and error histograms.
void bench_ie(const ProbabilisticGraph& graph, const GammaTable& gamma,
              const BenchIeConfig& config, std::ostream& csv);

enum class ImAlgo : std::uint8_t { GreedySkis = 0, GreedyRis = 1, DssaSkis = 2 };

const char* to_string(ImAlgo a);
ImAlgo im_algo_from_string(const std::string& s);

struct BenchImConfig {
  std::vector<std::uint32_t> k_values{10, 50};
  std::vector<std::uint64_t> budgets{1000, 10000, 100000};
  std::vector<ImAlgo> algos{ImAlgo::GreedySkis, ImAlgo::GreedyRis, ImAlgo::DssaSkis};
  std::uint32_t trials = 1;
  double eval_epsilon = 0.005;
  double eval_delta = 0.0;  // 0 -> 1/n
  double dssa_epsilon = 0.5;
  double dssa_delta = 0.0;  // 0 -> 1/n
  std::uint64_t seed = 7;
  unsigned workers = 1;
  bool timing = true;  // false zeroes the runtime column for reproducibility
};

/// Seed-selection benchmark: per (k, budget, algorithm, trial) row with the
/// Monte-Carlo re-evaluated influence, runtime, sketch memory, and samples.
/// The adaptive algorithm ignores budgets (one row per k, budget column 0).
void bench_im(const ProbabilisticGraph& graph, const GammaTable& gamma,
              const BenchImConfig& config, std::ostream& csv);

/// Scale-free digraph for benchmarks: each new node attaches to `attach`
/// degree-preferential targets; with probability `influenced_fraction` the
/// edges point target -> newcomer (hubs influence it), otherwise
/// newcomer -> target (it only feeds the hubs, keeping its in-degree zero).
std::vector<ProbabilisticGraph::Edge> generate_preferential_attachment(
    std::uint32_t node_count, std::uint32_t attach, double influenced_fraction,
    std::uint64_t seed);

}  // namespace skis
