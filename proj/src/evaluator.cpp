#include "skis/evaluator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "skis/errors.hpp"
#include "skis/maximizer.hpp"
#include "skis/oracle.hpp"

namespace skis {

namespace {

constexpr std::uint32_t kMaxExactEdgesIc = 22;
constexpr std::uint64_t kMaxExactOutcomesLt = std::uint64_t{1} << 22;
constexpr std::uint64_t kMcChunk = 2048;

std::vector<std::uint32_t> normalize_seeds(const ProbabilisticGraph& graph,
                                           std::span<const std::uint32_t> seed_set) {
  if (seed_set.empty()) throw validation_error("seed set is empty");
  std::vector<std::uint32_t> seeds(seed_set.begin(), seed_set.end());
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
  if (seeds.back() >= graph.node_count())
    throw validation_error("unknown node id " + std::to_string(seeds.back()));
  return seeds;
}

double exact_influence_ic(const ProbabilisticGraph& graph,
                          const std::vector<std::uint32_t>& seeds) {
  const std::uint32_t m = static_cast<std::uint32_t>(graph.edge_count());
  const std::uint32_t n = graph.node_count();
  const auto edges = graph.edges();
  std::vector<std::uint8_t> reached(n);
  std::vector<std::uint32_t> stack;
  double influence = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    double prob = 1.0;
    for (std::uint32_t e = 0; e < m; ++e)
      prob *= (mask >> e) & 1u ? edges[e].weight : 1.0 - edges[e].weight;
    if (prob == 0.0) continue;
    std::fill(reached.begin(), reached.end(), 0);
    stack.assign(seeds.begin(), seeds.end());
    for (std::uint32_t s : seeds) reached[s] = 1;
    std::uint32_t size = static_cast<std::uint32_t>(seeds.size());
    while (!stack.empty()) {
      const std::uint32_t u = stack.back();
      stack.pop_back();
      const auto outs = graph.out_neighbors(u);
      const auto eids = graph.out_edge_ids(u);
      for (std::size_t i = 0; i < outs.size(); ++i) {
        if (((mask >> eids[i]) & 1u) && !reached[outs[i]]) {
          reached[outs[i]] = 1;
          ++size;
          stack.push_back(outs[i]);
        }
      }
    }
    influence += prob * size;
  }
  return influence;
}

double exact_influence_lt(const ProbabilisticGraph& graph,
                          const std::vector<std::uint32_t>& seeds) {
  const std::uint32_t n = graph.node_count();
  // Odometer over per-node picks; digit d_in(v) means "no pick".
  std::vector<std::uint32_t> pick_nodes;
  for (std::uint32_t v = 0; v < n; ++v)
    if (graph.in_degree(v) > 0) pick_nodes.push_back(v);
  std::vector<std::uint32_t> digit(pick_nodes.size(), 0);
  std::vector<std::uint32_t> picked_in(n, n);  // n = no pick
  for (std::uint32_t v : pick_nodes) picked_in[v] = graph.in_neighbors(v)[0];

  std::vector<std::uint8_t> reached(n);
  std::vector<std::uint32_t> stack;
  double influence = 0.0;
  while (true) {
    double prob = 1.0;
    for (std::size_t i = 0; i < pick_nodes.size(); ++i) {
      const std::uint32_t v = pick_nodes[i];
      const auto ws = graph.in_weights(v);
      prob *= digit[i] < ws.size() ? ws[digit[i]]
                                   : std::max(0.0, 1.0 - graph.in_weight_sum(v));
    }
    if (prob > 0.0) {
      std::fill(reached.begin(), reached.end(), 0);
      stack.assign(seeds.begin(), seeds.end());
      for (std::uint32_t s : seeds) reached[s] = 1;
      std::uint32_t size = static_cast<std::uint32_t>(seeds.size());
      while (!stack.empty()) {
        const std::uint32_t u = stack.back();
        stack.pop_back();
        for (std::uint32_t x : graph.out_neighbors(u)) {
          if (!reached[x] && picked_in[x] == u) {
            reached[x] = 1;
            ++size;
            stack.push_back(x);
          }
        }
      }
      influence += prob * size;
    }
    // Advance the odometer.
    std::size_t i = 0;
    for (; i < pick_nodes.size(); ++i) {
      const std::uint32_t v = pick_nodes[i];
      if (++digit[i] <= graph.in_degree(v)) {
        picked_in[v] = digit[i] < graph.in_degree(v) ? graph.in_neighbors(v)[digit[i]]
                                                     : n;
        break;
      }
      digit[i] = 0;
      picked_in[v] = graph.in_neighbors(v)[0];
    }
    if (i == pick_nodes.size()) break;
  }
  return influence;
}

}  // namespace

const char* to_string(TruthMethod m) {
  return m == TruthMethod::Exact ? "exact" : "mc_stopping_rule";
}

bool exact_influence_feasible(const ProbabilisticGraph& graph) {
  if (graph.model() == Model::IC) return graph.edge_count() <= kMaxExactEdgesIc;
  std::uint64_t outcomes = 1;
  for (std::uint32_t v = 0; v < graph.node_count(); ++v) {
    const std::uint64_t radix = graph.in_degree(v) + std::uint64_t{1};
    if (outcomes > kMaxExactOutcomesLt / radix) return false;
    outcomes *= radix;
  }
  return true;
}

TruthEstimate exact_influence(const ProbabilisticGraph& graph,
                              std::span<const std::uint32_t> seed_set) {
  const auto seeds = normalize_seeds(graph, seed_set);
  if (!exact_influence_feasible(graph)) {
    throw size_error(graph.model() == Model::IC
                         ? "exact IC enumeration limited to 22 edges"
                         : "exact LT enumeration limited to 2^22 pick outcomes");
  }
  TruthEstimate t;
  t.method = TruthMethod::Exact;
  t.value = graph.model() == Model::IC ? exact_influence_ic(graph, seeds)
                                       : exact_influence_lt(graph, seeds);
  return t;
}

ForwardSimulator::ForwardSimulator(const ProbabilisticGraph& graph)
    : graph_(&graph),
      active_epoch_(graph.node_count(), 0),
      exposed_epoch_(graph.node_count(), 0),
      threshold_(graph.node_count(), 0.0),
      pressure_(graph.node_count(), 0.0) {}

std::uint32_t ForwardSimulator::cascade_size(std::span<const std::uint32_t> seed_set,
                                             RngStream& rng) {
  if (++epoch_ == 0) {
    std::fill(active_epoch_.begin(), active_epoch_.end(), 0u);
    std::fill(exposed_epoch_.begin(), exposed_epoch_.end(), 0u);
    epoch_ = 1;
  }
  frontier_.clear();
  std::uint32_t count = 0;
  for (std::uint32_t s : seed_set) {
    if (active_epoch_[s] == epoch_) continue;
    active_epoch_[s] = epoch_;
    frontier_.push_back(s);
    ++count;
  }
  const bool ic = graph_->model() == Model::IC;
  for (std::size_t head = 0; head < frontier_.size(); ++head) {
    const std::uint32_t u = frontier_[head];
    const auto outs = graph_->out_neighbors(u);
    const auto ws = graph_->out_weights(u);
    for (std::size_t i = 0; i < outs.size(); ++i) {
      const std::uint32_t v = outs[i];
      if (active_epoch_[v] == epoch_) continue;
      if (ic) {
        if (rng.bernoulli(ws[i])) {
          active_epoch_[v] = epoch_;
          frontier_.push_back(v);
          ++count;
        }
      } else {
        if (exposed_epoch_[v] != epoch_) {
          exposed_epoch_[v] = epoch_;
          threshold_[v] = rng.next_unit();
          pressure_[v] = 0.0;
        }
        pressure_[v] += ws[i];
        if (pressure_[v] >= threshold_[v]) {
          active_epoch_[v] = epoch_;
          frontier_.push_back(v);
          ++count;
        }
      }
    }
  }
  return count;
}

double mc_stopping_threshold(double epsilon, double delta) {
  return 4.0 * (std::exp(1.0) - 2.0) * std::log(2.0 / delta) / (epsilon * epsilon);
}

TruthEstimate monte_carlo_influence(const ProbabilisticGraph& graph,
                                    std::span<const std::uint32_t> seed_set,
                                    double epsilon, double delta,
                                    std::uint64_t base_seed, unsigned worker_count) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw validation_error("epsilon must be in (0,1)");
  if (!(delta > 0.0 && delta < 1.0)) throw validation_error("delta must be in (0,1)");
  const auto seeds = normalize_seeds(graph, seed_set);
  if (worker_count == 0) worker_count = 1;
  const double n = static_cast<double>(graph.node_count());
  const double threshold = mc_stopping_threshold(epsilon, delta);

  std::vector<ForwardSimulator> sims;
  sims.reserve(worker_count);
  for (unsigned w = 0; w < worker_count; ++w) sims.emplace_back(graph);
  std::vector<double> chunk(kMcChunk, 0.0);

  double sum_z = 0.0;
  std::uint64_t used = 0;
  while (sum_z < threshold) {
#ifdef _OPENMP
    #pragma omp parallel for schedule(static) num_threads(static_cast<int>(worker_count)) if (worker_count > 1)
#endif
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(kMcChunk); ++i) {
#ifdef _OPENMP
      ForwardSimulator& sim = sims[static_cast<std::size_t>(omp_get_thread_num())];
#else
      ForwardSimulator& sim = sims[0];
#endif
      RngStream rng(base_seed, used + static_cast<std::uint64_t>(i));
      chunk[static_cast<std::size_t>(i)] = sim.cascade_size(seeds, rng) / n;
    }
    // Serial accumulation in index order keeps the result worker-invariant.
    for (double z : chunk) sum_z += z;
    used += kMcChunk;
  }
  TruthEstimate t;
  t.method = TruthMethod::McStoppingRule;
  t.epsilon = epsilon;
  t.delta = delta;
  t.samples_used = used;
  t.value = sum_z / static_cast<double>(used) * n;
  return t;
}

double relative_difference(double estimate, double truth) {
  const double hi = std::max(estimate, truth);
  if (hi <= 0.0) return 0.0;
  return std::abs(estimate - truth) / hi * 100.0;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::vector<std::uint32_t> random_seed_set(std::uint32_t n, std::uint32_t size,
                                           RngStream& rng) {
  std::vector<std::uint32_t> out;
  out.reserve(size);
  while (out.size() < size) {
    const std::uint32_t v = rng.next_below(n);
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

TruthEstimate truth_of(const ProbabilisticGraph& graph,
                       std::span<const std::uint32_t> seeds, double mc_eps,
                       double mc_delta, std::uint64_t seed, unsigned workers) {
  if (exact_influence_feasible(graph)) return exact_influence(graph, seeds);
  return monte_carlo_influence(graph, seeds, mc_eps, mc_delta, seed, workers);
}

}  // namespace

void bench_ie(const ProbabilisticGraph& graph, const GammaTable& gamma,
              const BenchIeConfig& config, std::ostream& csv) {
  const std::uint32_t n = graph.node_count();
  const double mc_delta = config.mc_delta > 0.0 ? config.mc_delta : 1.0 / std::max(n, 2u);
  csv << "row_type,kind,h,T,total_entries,set_size,query,truth_method,truth,"
         "estimate,rel_diff_pct,bin_low,bin_high,count\n";
  if (n == 0) return;

  // Shared query sets and truths, one batch per set size.
  struct Query {
    std::vector<std::uint32_t> seeds;
    TruthEstimate truth;
  };
  std::vector<std::pair<std::uint32_t, std::vector<Query>>> batches;
  for (std::uint32_t size : config.set_sizes) {
    if (size > n) continue;
    std::vector<Query> qs(config.query_count);
    for (std::uint32_t q = 0; q < config.query_count; ++q) {
      RngStream rng(config.seed, (static_cast<std::uint64_t>(size) << 32) | q);
      qs[q].seeds = random_seed_set(n, size, rng);
      qs[q].truth = truth_of(graph, qs[q].seeds, config.mc_epsilon, mc_delta,
                             RngStream::mix64(config.seed ^ ((0x7157ull + q) * (size + 1))),
                             config.workers);
    }
    batches.emplace_back(size, std::move(qs));
  }

  for (SampleKind kind : config.kinds) {
    for (double h : config.h_values) {
      const Sketch sketch =
          build_sketch(graph, gamma, kind, GrowthPolicy::total_size_scaled(h, n),
                       RngStream::mix64(config.seed ^ static_cast<std::uint64_t>(h * 4096) ^
                                        (kind == SampleKind::SKIS ? 0x51ull : 0xA1ull)),
                       config.workers);
      for (const auto& [size, queries] : batches) {
        double sum_diff = 0.0;
        std::vector<std::uint32_t> hist(11, 0);  // 2%-wide bins, last = overflow
        for (std::uint32_t q = 0; q < queries.size(); ++q) {
          const Estimate est = estimate_influence(sketch, queries[q].seeds);
          const double diff = relative_difference(est.value, queries[q].truth.value);
          sum_diff += diff;
          hist[std::min<std::size_t>(static_cast<std::size_t>(diff / 2.0), 10)]++;
          csv << "query," << to_string(kind) << ',' << format_double(h) << ','
              << sketch.sample_count() << ',' << sketch.total_entries() << ','
              << size << ',' << q << ',' << to_string(queries[q].truth.method) << ','
              << format_double(queries[q].truth.value) << ','
              << format_double(est.value) << ',' << format_double(diff)
              << ",,,\n";
        }
        if (!queries.empty()) {
          csv << "aggregate," << to_string(kind) << ',' << format_double(h) << ','
              << sketch.sample_count() << ',' << sketch.total_entries() << ','
              << size << ",,,,," << format_double(sum_diff / queries.size())
              << ",,," << queries.size() << '\n';
          for (std::size_t b = 0; b < hist.size(); ++b) {
            csv << "hist," << to_string(kind) << ',' << format_double(h) << ','
                << sketch.sample_count() << ',' << sketch.total_entries() << ','
                << size << ",,,,,," << format_double(2.0 * b) << ','
                << (b + 1 < hist.size() ? format_double(2.0 * (b + 1)) : "inf")
                << ',' << hist[b] << '\n';
          }
        }
      }
    }
  }
}

const char* to_string(ImAlgo a) {
  switch (a) {
    case ImAlgo::GreedySkis:
      return "greedy_skis";
    case ImAlgo::GreedyRis:
      return "greedy_ris";
    case ImAlgo::DssaSkis:
      return "dssa_skis";
  }
  return "greedy_skis";
}

ImAlgo im_algo_from_string(const std::string& s) {
  if (s == "greedy_skis") return ImAlgo::GreedySkis;
  if (s == "greedy_ris") return ImAlgo::GreedyRis;
  if (s == "dssa_skis") return ImAlgo::DssaSkis;
  throw validation_error("unknown algorithm '" + s + "'");
}

void bench_im(const ProbabilisticGraph& graph, const GammaTable& gamma,
              const BenchImConfig& config, std::ostream& csv) {
  using clock = std::chrono::steady_clock;
  const std::uint32_t n = graph.node_count();
  const double eval_delta =
      config.eval_delta > 0.0 ? config.eval_delta : 1.0 / std::max(n, 2u);
  const double dssa_delta =
      config.dssa_delta > 0.0 ? config.dssa_delta : 1.0 / std::max(n, 2u);
  csv << "row_type,algo,k,budget,trial,samples,influence,runtime_sec,"
         "memory_bytes,seeds\n";

  const auto emit = [&](ImAlgo algo, std::uint32_t k, std::uint64_t budget,
                        std::uint32_t trial, std::uint64_t samples, double influence,
                        double seconds, std::uint64_t bytes,
                        const std::vector<std::uint32_t>& seeds) {
    csv << "result," << to_string(algo) << ',' << k << ',' << budget << ',' << trial
        << ',' << samples << ',' << format_double(influence) << ','
        << format_double(config.timing ? seconds : 0.0) << ',' << bytes << ',';
    for (std::size_t i = 0; i < seeds.size(); ++i)
      csv << (i ? " " : "") << seeds[i];
    csv << '\n';
  };

  for (std::uint32_t trial = 0; trial < config.trials; ++trial) {
    const std::uint64_t trial_seed = RngStream::mix64(config.seed + trial);
    // Common random numbers across algorithms within a trial: shared
    // evaluation stream makes equal seed sets evaluate identically.
    const std::uint64_t eval_seed = RngStream::mix64(trial_seed ^ 0xE7A1ull);
    for (std::uint32_t k : config.k_values) {
      if (k > n) continue;
      for (ImAlgo algo : config.algos) {
        if (algo == ImAlgo::DssaSkis) {
          const auto t0 = clock::now();
          const DssaResult res = dssa_skis(graph, gamma, k, config.dssa_epsilon,
                                           dssa_delta, trial_seed, config.workers);
          const double secs = std::chrono::duration<double>(clock::now() - t0).count();
          const TruthEstimate mc =
              monte_carlo_influence(graph, res.seeds, config.eval_epsilon, eval_delta,
                                    eval_seed, config.workers);
          emit(algo, k, 0, trial, res.samples_used, mc.value, secs, 0, res.seeds);
          continue;
        }
        const SampleKind kind =
            algo == ImAlgo::GreedySkis ? SampleKind::SKIS : SampleKind::RIS;
        for (std::uint64_t budget : config.budgets) {
          const auto t0 = clock::now();
          const Sketch sketch =
              build_sketch(graph, gamma, kind, GrowthPolicy::fixed_count(budget),
                           RngStream::mix64(trial_seed ^ (budget * 2 + (kind == SampleKind::SKIS))),
                           config.workers);
          const GreedySolution sol = greedy(sketch, k);
          const double secs = std::chrono::duration<double>(clock::now() - t0).count();
          const TruthEstimate mc =
              monte_carlo_influence(graph, sol.seeds, config.eval_epsilon, eval_delta,
                                    eval_seed, config.workers);
          emit(algo, k, budget, trial, sketch.sample_count(), mc.value, secs,
               sketch.memory_bytes(), sol.seeds);
        }
      }
    }
  }
}

std::vector<ProbabilisticGraph::Edge> generate_preferential_attachment(
    std::uint32_t node_count, std::uint32_t attach, double influenced_fraction,
    std::uint64_t seed) {
  if (node_count < attach + 1) throw validation_error("node count too small");
  std::vector<ProbabilisticGraph::Edge> edges;
  std::vector<std::uint32_t> pool;  // node repeated per incident edge
  RngStream rng(seed, 0);
  // Seed core: a directed cycle over the first attach+1 nodes.
  for (std::uint32_t v = 0; v <= attach; ++v) {
    const std::uint32_t u = (v + 1) % (attach + 1);
    edges.push_back({v, u, 0.0});
    pool.push_back(v);
    pool.push_back(u);
  }
  std::vector<std::uint32_t> targets;
  for (std::uint32_t v = attach + 1; v < node_count; ++v) {
    targets.clear();
    while (targets.size() < attach) {
      const std::uint32_t t = pool[rng.next_below(static_cast<std::uint32_t>(pool.size()))];
      if (t != v && std::find(targets.begin(), targets.end(), t) == targets.end())
        targets.push_back(t);
    }
    const bool influenced = rng.bernoulli(influenced_fraction);
    for (std::uint32_t t : targets) {
      if (influenced) {
        edges.push_back({t, v, 0.0});
        pool.push_back(v);
      } else {
        // Feeder nodes stay out of the pool: in-edges concentrate on the
        // established targets and most of the graph keeps in-degree zero,
        // the regime where singular cascades dominate.
        edges.push_back({v, t, 0.0});
      }
      pool.push_back(t);
    }
  }
  return edges;
}

}  // namespace skis
