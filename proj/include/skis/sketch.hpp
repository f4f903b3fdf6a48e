#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "skis/graph.hpp"
#include "skis/sampler.hpp"

namespace skis {

/// How long to keep generating samples.
struct GrowthPolicy {
  enum class Mode : std::uint8_t { FixedCount = 0, TotalSize = 1 };
  Mode mode = Mode::FixedCount;
  std::uint64_t target = 1;  // samples (FixedCount) or summed sample sizes

  static GrowthPolicy fixed_count(std::uint64_t samples);
  static GrowthPolicy total_size(std::uint64_t entries);
  /// target = ceil(h * n * ln n); natural log.
  static GrowthPolicy total_size_scaled(double h, std::uint32_t node_count);
};

/// A collection of reverse cascades with an inverted node -> sample index.
/// Carries Gamma and the per-node gamma values so influence queries need no
/// graph. Immutable after build; safe for unlimited concurrent readers.
class Sketch {
 public:
  SampleKind kind = SampleKind::SKIS;
  Model model = Model::IC;
  std::uint32_t node_count = 0;
  std::uint64_t graph_hash = 0;
  double gamma_total = 0.0;
  std::vector<double> node_gamma;

  std::uint64_t sample_count() const { return sources_.size(); }
  std::uint64_t total_entries() const { return nodes_.size(); }

  std::uint32_t source(std::uint64_t j) const { return sources_[j]; }
  std::span<const std::uint32_t> sample(std::uint64_t j) const {
    return {nodes_.data() + offsets_[j], nodes_.data() + offsets_[j + 1]};
  }
  /// Ids of the samples containing v (requires a built index).
  std::span<const std::uint32_t> samples_containing(std::uint32_t v) const {
    return {inv_samples_.data() + inv_off_[v], inv_samples_.data() + inv_off_[v + 1]};
  }

  void append(const Sample& s);
  void rebuild_index();
  bool index_built() const { return inv_off_.size() == node_count + 1u; }

  /// Number of samples intersecting the seed set.
  std::uint64_t coverage(std::span<const std::uint32_t> seed_set) const;

  /// Bytes of sample, index, and gamma storage (deterministic).
  std::uint64_t memory_bytes() const;

  bool equals(const Sketch& other) const;

 private:
  std::vector<std::uint32_t> sources_;
  std::vector<std::uint64_t> offsets_{0};
  std::vector<std::uint32_t> nodes_;
  std::vector<std::uint64_t> inv_off_;
  std::vector<std::uint32_t> inv_samples_;
};

Sketch make_empty_sketch(const ProbabilisticGraph& graph, const GammaTable& gamma,
                         SampleKind kind);

/// Generates samples until the policy target is met. Sample j always draws
/// from stream (base_seed, j), so the result is byte-identical for any worker
/// count; workers only split the generation. FixedCount hits the target
/// exactly; TotalSize may overshoot by at most one chunk, never undershoots.
Sketch build_sketch(const ProbabilisticGraph& graph, const GammaTable& gamma,
                    SampleKind kind, GrowthPolicy policy, std::uint64_t base_seed,
                    unsigned worker_count);

/// Straight-line single-thread builder kept as the reference implementation;
/// checks the policy after every sample (exact stop for TotalSize).
Sketch build_sketch_serial(const ProbabilisticGraph& graph, const GammaTable& gamma,
                           SampleKind kind, GrowthPolicy policy,
                           std::uint64_t base_seed);

/// Grows an existing sketch to `target_samples`, continuing the per-sample
/// stream ids where the sketch left off. Rebuilds the index.
void extend_sketch(Sketch& sketch, const ProbabilisticGraph& graph,
                   const GammaTable& gamma, std::uint64_t target_samples,
                   std::uint64_t base_seed, unsigned worker_count);

/// Concatenates two sketches over the same graph/kind/model.
Sketch merge_sketches(const Sketch& a, const Sketch& b);

void serialize_sketch(const Sketch& sketch, std::ostream& out);
Sketch deserialize_sketch(std::istream& in);

}  // namespace skis
