#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "skis/errors.hpp"
#include "skis/rng.hpp"

namespace skis {

enum class Model : std::uint8_t { IC = 0, LT = 1 };
enum class WeightMode : std::uint8_t { Given = 0, WC = 1, Tri = 2, LtRandom = 3 };

const char* to_string(Model m);
const char* to_string(WeightMode m);
Model model_from_string(const std::string& s);
WeightMode weight_mode_from_string(const std::string& s);

/// Directed graph with per-edge influence probabilities, stored as CSR
/// in-adjacency (the canonical edge order: target-major, in-neighbors
/// ascending) plus a derived out-adjacency for forward simulation.
/// Immutable after construction except through replace_in_weights(), which
/// revalidates and rebuilds all derived state. Safe for concurrent reads.
class ProbabilisticGraph {
 public:
  struct Edge {
    std::uint32_t from = 0;
    std::uint32_t to = 0;
    double weight = 0.0;
  };

  ProbabilisticGraph() = default;

  /// Validates and finalizes: rejects self-loops, duplicate (u,v) pairs,
  /// weights outside [0,1], and LT in-weight sums above 1 + 1e-9.
  ProbabilisticGraph(Model model, std::uint32_t node_count, std::vector<Edge> edges);

  std::uint32_t node_count() const { return node_count_; }
  std::uint64_t edge_count() const { return in_nbr_.size(); }
  Model model() const { return model_; }

  std::uint32_t in_degree(std::uint32_t v) const {
    return static_cast<std::uint32_t>(in_off_[v + 1] - in_off_[v]);
  }
  std::span<const std::uint32_t> in_neighbors(std::uint32_t v) const {
    return {in_nbr_.data() + in_off_[v], in_nbr_.data() + in_off_[v + 1]};
  }
  std::span<const double> in_weights(std::uint32_t v) const {
    return {in_w_.data() + in_off_[v], in_w_.data() + in_off_[v + 1]};
  }
  /// Sum of incoming weights (the LT non-singularity probability).
  double in_weight_sum(std::uint32_t v) const { return in_sum_[v]; }

  std::uint32_t out_degree(std::uint32_t u) const {
    return static_cast<std::uint32_t>(out_off_[u + 1] - out_off_[u]);
  }
  std::span<const std::uint32_t> out_neighbors(std::uint32_t u) const {
    return {out_nbr_.data() + out_off_[u], out_nbr_.data() + out_off_[u + 1]};
  }
  std::span<const double> out_weights(std::uint32_t u) const {
    return {out_w_.data() + out_off_[u], out_w_.data() + out_off_[u + 1]};
  }
  /// Canonical edge ids aligned with out_neighbors(u); an edge's id is its
  /// position in the in-CSR order. Used by exact enumeration.
  std::span<const std::uint32_t> out_edge_ids(std::uint32_t u) const {
    return {out_eid_.data() + out_off_[u], out_eid_.data() + out_off_[u + 1]};
  }

  /// Edges in canonical order (edge id == index into the result).
  std::vector<Edge> edges() const;

  /// Replaces all edge weights, keeping the topology. `weights` follows the
  /// canonical edge order. Revalidates and recomputes derived state.
  void replace_in_weights(std::vector<double> weights);

  /// FNV-1a over topology, weights, and model; binds sketches to graphs.
  std::uint64_t content_hash() const { return hash_; }

 private:
  void finalize();

  Model model_ = Model::IC;
  std::uint32_t node_count_ = 0;
  std::vector<std::uint64_t> in_off_{0};
  std::vector<std::uint32_t> in_nbr_;
  std::vector<double> in_w_;
  std::vector<double> in_sum_;
  std::vector<std::uint64_t> out_off_{0};
  std::vector<std::uint32_t> out_nbr_;
  std::vector<double> out_w_;
  std::vector<std::uint32_t> out_eid_;
  std::uint64_t hash_ = 0;
};

/// Per-node non-singularity probabilities and the source-sampling
/// distribution. Immutable once computed.
struct GammaTable {
  std::vector<double> gamma;       // gamma_v per node
  double total = 0.0;              // Gamma = sum
  std::vector<double> source_cdf;  // prefix sums of gamma_v / Gamma; last == 1

  /// Gamma / n, the mean non-singularity probability.
  double gamma0() const {
    return gamma.empty() ? 0.0 : total / static_cast<double>(gamma.size());
  }
};

/// IC: gamma_v = 1 - prod(1 - w); LT: gamma_v = sum(w). A unit-weight edge
/// forces gamma_v = 1; nodes without in-edges get 0. Deterministic.
GammaTable compute_gamma(const ProbabilisticGraph& graph);

/// Reads "u v" or "u v w" lines (0-based ids, '#' comments skipped) and
/// applies the weight mode. GIVEN requires the third column; the other modes
/// overwrite any supplied weights. rng_seed feeds Tri / LtRandom draws.
ProbabilisticGraph load_edge_list(std::istream& in, Model model, WeightMode mode,
                                  std::uint64_t rng_seed);

/// Every edge weight drawn uniformly from {0.1, 0.01, 0.001}.
void assign_trivalency(ProbabilisticGraph& graph, RngStream& rng);

/// Per node: incoming weights rescaled to sum to a fresh uniform r in [0,1],
/// preserving their relative proportions (equal shares when all priors are
/// zero). LT model only.
void assign_lt_random(ProbabilisticGraph& graph, RngStream& rng);

/// Weighted-cascade weights: w(u,v) = 1 / d_in(v).
void assign_weighted_cascade(ProbabilisticGraph& graph);

struct GraphMetadata {
  std::uint32_t node_count = 0;
  std::uint64_t edge_count = 0;
  Model model = Model::IC;
  WeightMode weight_mode = WeightMode::Given;
  std::uint64_t rng_seed = 0;
  std::uint64_t graph_hash = 0;
};

void write_metadata(const GraphMetadata& meta, std::ostream& out);
GraphMetadata read_metadata(std::istream& in);

}  // namespace skis
