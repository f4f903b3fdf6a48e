#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "skis/graph.hpp"
#include "skis/rng.hpp"

namespace skis {

enum class SampleKind : std::uint8_t { SKIS = 0, RIS = 1 };

const char* to_string(SampleKind k);
SampleKind sample_kind_from_string(const std::string& s);

/// One reverse cascade: a source plus every node that reached it.
/// `nodes` is sorted ascending and always contains the source; importance
/// samples additionally have at least two nodes.
struct Sample {
  std::uint32_t source = 0;
  std::vector<std::uint32_t> nodes;
  SampleKind kind = SampleKind::RIS;
};

/// Draws a source with probability gamma_v / Gamma by binary search on the
/// table's CDF. Throws no_mass_error when Gamma = 0.
std::uint32_t draw_source(const GammaTable& table, RngStream& rng);

/// Picks the first live in-neighbor index i with probability
/// prod_{t<i}(1 - w_t) * w_i / gamma_v over the fixed in-neighbor order.
std::size_t select_bucket(std::span<const double> in_weights, double gamma_v,
                          RngStream& rng);

/// Reverse-cascade generator with per-worker scratch (epoch-stamped visited
/// array and a FIFO queue reused across samples). Stateless apart from the
/// scratch: one instance per worker, no shared mutable state.
class CascadeSampler {
 public:
  CascadeSampler(const ProbabilisticGraph& graph, const GammaTable& gamma);

  /// Importance sample, dispatching on the graph's diffusion model.
  void sample_iis(RngStream& rng, Sample& out);
  /// Plain reverse-reachability sample (may be singular).
  void sample_ris(RngStream& rng, Sample& out);

  void sample_iis_ic(RngStream& rng, Sample& out);
  void sample_ris_ic(RngStream& rng, Sample& out);
  void sample_iis_lt(RngStream& rng, Sample& out);
  void sample_ris_lt(RngStream& rng, Sample& out);

 private:
  void begin_visit();
  bool visited(std::uint32_t v) const { return visit_epoch_[v] == epoch_; }
  void visit(std::uint32_t v) { visit_epoch_[v] = epoch_; }
  void finish(Sample& out, std::uint32_t source, SampleKind kind);
  /// LT step: at most one in-neighbor of `cur`, chosen with probability equal
  /// to the edge weight; returns false when no pick happens.
  bool lt_pick(std::uint32_t cur, RngStream& rng, std::uint32_t& picked);

  const ProbabilisticGraph* graph_;
  const GammaTable* gamma_;
  std::vector<std::uint32_t> visit_epoch_;
  std::uint32_t epoch_ = 0;
  std::vector<std::uint32_t> reached_;  // doubles as the BFS queue
};

}  // namespace skis
