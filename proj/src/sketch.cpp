#include "skis/sketch.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "skis/errors.hpp"

namespace skis {

namespace {
constexpr std::uint64_t kChunkSamples = 1024;
constexpr char kMagic[5] = {'S', 'K', 'I', 'S', '1'};
constexpr std::uint8_t kFormatVersion = 1;  // v2 reserved for continuous-time
}  // namespace

GrowthPolicy GrowthPolicy::fixed_count(std::uint64_t samples) {
  return {Mode::FixedCount, samples};
}

GrowthPolicy GrowthPolicy::total_size(std::uint64_t entries) {
  return {Mode::TotalSize, entries};
}

GrowthPolicy GrowthPolicy::total_size_scaled(double h, std::uint32_t node_count) {
  const double n = static_cast<double>(node_count);
  const double raw = h * n * std::log(std::max(n, 2.0));
  return {Mode::TotalSize, static_cast<std::uint64_t>(std::ceil(raw))};
}

void Sketch::append(const Sample& s) {
  sources_.push_back(s.source);
  nodes_.insert(nodes_.end(), s.nodes.begin(), s.nodes.end());
  offsets_.push_back(nodes_.size());
  inv_off_.clear();
  inv_samples_.clear();
}

void Sketch::rebuild_index() {
  inv_off_.assign(node_count + 1u, 0);
  for (std::uint32_t v : nodes_) inv_off_[v + 1]++;
  for (std::uint32_t v = 0; v < node_count; ++v) inv_off_[v + 1] += inv_off_[v];
  inv_samples_.assign(nodes_.size(), 0);
  std::vector<std::uint64_t> cursor(inv_off_.begin(), inv_off_.end() - 1);
  const std::uint64_t t = sample_count();
  for (std::uint64_t j = 0; j < t; ++j) {
    for (std::uint32_t v : sample(j))
      inv_samples_[cursor[v]++] = static_cast<std::uint32_t>(j);
  }
}

std::uint64_t Sketch::coverage(std::span<const std::uint32_t> seed_set) const {
  std::vector<std::uint32_t> hits;
  for (std::uint32_t v : seed_set) {
    if (v >= node_count) throw validation_error("unknown node id " + std::to_string(v));
    const auto list = samples_containing(v);
    hits.insert(hits.end(), list.begin(), list.end());
  }
  std::sort(hits.begin(), hits.end());
  hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
  return hits.size();
}

std::uint64_t Sketch::memory_bytes() const {
  return sources_.size() * sizeof(std::uint32_t) +
         offsets_.size() * sizeof(std::uint64_t) +
         nodes_.size() * sizeof(std::uint32_t) +
         inv_off_.size() * sizeof(std::uint64_t) +
         inv_samples_.size() * sizeof(std::uint32_t) +
         node_gamma.size() * sizeof(double);
}

bool Sketch::equals(const Sketch& other) const {
  return kind == other.kind && model == other.model &&
         node_count == other.node_count && graph_hash == other.graph_hash &&
         gamma_total == other.gamma_total && node_gamma == other.node_gamma &&
         sources_ == other.sources_ && offsets_ == other.offsets_ &&
         nodes_ == other.nodes_;
}

Sketch make_empty_sketch(const ProbabilisticGraph& graph, const GammaTable& gamma,
                         SampleKind kind) {
  Sketch sk;
  sk.kind = kind;
  sk.model = graph.model();
  sk.node_count = graph.node_count();
  sk.graph_hash = graph.content_hash();
  sk.gamma_total = gamma.total;
  sk.node_gamma = gamma.gamma;
  return sk;
}

namespace {

bool policy_met(const Sketch& sk, const GrowthPolicy& policy) {
  if (policy.mode == GrowthPolicy::Mode::FixedCount)
    return sk.sample_count() >= policy.target;
  return sk.total_entries() >= policy.target;
}

void check_build_preconditions(const ProbabilisticGraph& graph,
                               const GammaTable& gamma, SampleKind kind,
                               const GrowthPolicy& policy) {
  if (policy.target < 1) throw validation_error("growth target must be >= 1");
  if (graph.node_count() == 0) throw validation_error("cannot sample an empty graph");
  if (kind == SampleKind::SKIS && gamma.total <= 0.0)
    throw no_mass_error("cannot build an importance sketch with Gamma = 0");
}

/// Fills `chunk` with samples for stream ids [first_id, first_id + count).
void generate_chunk(SampleKind kind, std::uint64_t base_seed, std::uint64_t first_id,
                    std::uint64_t count, unsigned worker_count,
                    std::vector<Sample>& chunk,
                    std::vector<CascadeSampler>& scratch) {
  chunk.resize(count);
#ifdef _OPENMP
  if (worker_count > 1) {
    #pragma omp parallel for schedule(static) num_threads(static_cast<int>(worker_count))
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(count); ++i) {
      CascadeSampler& sampler = scratch[static_cast<std::size_t>(omp_get_thread_num())];
      RngStream rng(base_seed, first_id + static_cast<std::uint64_t>(i));
      if (kind == SampleKind::SKIS)
        sampler.sample_iis(rng, chunk[static_cast<std::size_t>(i)]);
      else
        sampler.sample_ris(rng, chunk[static_cast<std::size_t>(i)]);
    }
    return;
  }
#else
  (void)worker_count;
#endif
  CascadeSampler& sampler = scratch[0];
  for (std::uint64_t i = 0; i < count; ++i) {
    RngStream rng(base_seed, first_id + i);
    if (kind == SampleKind::SKIS)
      sampler.sample_iis(rng, chunk[i]);
    else
      sampler.sample_ris(rng, chunk[i]);
  }
}

void grow(Sketch& sk, const ProbabilisticGraph& graph, const GammaTable& gamma,
          const GrowthPolicy& policy, std::uint64_t base_seed, unsigned worker_count) {
  if (worker_count == 0) worker_count = 1;
  std::vector<CascadeSampler> scratch;
  scratch.reserve(worker_count);
  for (unsigned w = 0; w < worker_count; ++w) scratch.emplace_back(graph, gamma);
  std::vector<Sample> chunk;
  while (!policy_met(sk, policy)) {
    std::uint64_t count = kChunkSamples;
    if (policy.mode == GrowthPolicy::Mode::FixedCount)
      count = std::min(count, policy.target - sk.sample_count());
    generate_chunk(sk.kind, base_seed, sk.sample_count(), count, worker_count,
                   chunk, scratch);
    for (const Sample& s : chunk) sk.append(s);
  }
}

}  // namespace

Sketch build_sketch(const ProbabilisticGraph& graph, const GammaTable& gamma,
                    SampleKind kind, GrowthPolicy policy, std::uint64_t base_seed,
                    unsigned worker_count) {
  check_build_preconditions(graph, gamma, kind, policy);
  Sketch sk = make_empty_sketch(graph, gamma, kind);
  grow(sk, graph, gamma, policy, base_seed, worker_count);
  sk.rebuild_index();
  return sk;
}

Sketch build_sketch_serial(const ProbabilisticGraph& graph, const GammaTable& gamma,
                           SampleKind kind, GrowthPolicy policy,
                           std::uint64_t base_seed) {
  check_build_preconditions(graph, gamma, kind, policy);
  Sketch sk = make_empty_sketch(graph, gamma, kind);
  CascadeSampler sampler(graph, gamma);
  Sample s;
  while (!policy_met(sk, policy)) {
    RngStream rng(base_seed, sk.sample_count());
    if (kind == SampleKind::SKIS)
      sampler.sample_iis(rng, s);
    else
      sampler.sample_ris(rng, s);
    sk.append(s);
  }
  sk.rebuild_index();
  return sk;
}

void extend_sketch(Sketch& sketch, const ProbabilisticGraph& graph,
                   const GammaTable& gamma, std::uint64_t target_samples,
                   std::uint64_t base_seed, unsigned worker_count) {
  if (graph.content_hash() != sketch.graph_hash)
    throw incompatible_error("sketch was built from a different graph");
  grow(sketch, graph, gamma, GrowthPolicy::fixed_count(target_samples), base_seed,
       worker_count);
  sketch.rebuild_index();
}

Sketch merge_sketches(const Sketch& a, const Sketch& b) {
  if (a.graph_hash != b.graph_hash || a.kind != b.kind || a.model != b.model)
    throw incompatible_error("sketches disagree on graph hash, kind, or model");
  Sketch out = a;
  const std::uint64_t t = b.sample_count();
  Sample s;
  for (std::uint64_t j = 0; j < t; ++j) {
    const auto nodes = b.sample(j);
    s.source = b.source(j);
    s.kind = b.kind;
    s.nodes.assign(nodes.begin(), nodes.end());
    out.append(s);
  }
  out.rebuild_index();
  return out;
}

namespace {

void put_bytes(std::ostream& out, const void* p, std::size_t len) {
  out.write(static_cast<const char*>(p), static_cast<std::streamsize>(len));
}

template <typename T>
void put(std::ostream& out, T v) {
  put_bytes(out, &v, sizeof(v));
}

void put_varint(std::ostream& out, std::uint64_t v) {
  while (v >= 0x80) {
    put<std::uint8_t>(out, static_cast<std::uint8_t>(v) | 0x80);
    v >>= 7;
  }
  put<std::uint8_t>(out, static_cast<std::uint8_t>(v));
}

void get_bytes(std::istream& in, void* p, std::size_t len) {
  in.read(static_cast<char*>(p), static_cast<std::streamsize>(len));
  if (static_cast<std::size_t>(in.gcount()) != len)
    throw format_error("truncated sketch stream");
}

template <typename T>
T get(std::istream& in) {
  T v;
  get_bytes(in, &v, sizeof(v));
  return v;
}

std::uint64_t get_varint(std::istream& in) {
  std::uint64_t v = 0;
  int shift = 0;
  while (true) {
    const auto byte = get<std::uint8_t>(in);
    v |= static_cast<std::uint64_t>(byte & 0x7F) << shift;
    if (!(byte & 0x80)) return v;
    shift += 7;
    if (shift > 63) throw format_error("varint overflow");
  }
}

}  // namespace

void serialize_sketch(const Sketch& sk, std::ostream& out) {
  static_assert(std::endian::native == std::endian::little,
                "sketch format is little-endian");
  put_bytes(out, kMagic, sizeof(kMagic));
  put<std::uint8_t>(out, kFormatVersion);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(sk.kind));
  put<std::uint8_t>(out, static_cast<std::uint8_t>(sk.model));
  put<std::uint32_t>(out, sk.node_count);
  put<std::uint64_t>(out, sk.sample_count());
  put<std::uint64_t>(out, sk.total_entries());
  put<double>(out, sk.gamma_total);
  put<std::uint64_t>(out, sk.graph_hash);
  for (double g : sk.node_gamma) put<double>(out, g);
  const std::uint64_t t = sk.sample_count();
  for (std::uint64_t j = 0; j < t; ++j) {
    const auto nodes = sk.sample(j);
    put_varint(out, nodes.size());
    // Source first, remaining ids ascending.
    put<std::uint32_t>(out, sk.source(j));
    for (std::uint32_t v : nodes) {
      if (v != sk.source(j)) put<std::uint32_t>(out, v);
    }
  }
  if (!out) throw io_error("sketch write failed");
}

Sketch deserialize_sketch(std::istream& in) {
  char magic[5];
  get_bytes(in, magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw format_error("bad sketch magic");
  const auto version = get<std::uint8_t>(in);
  if (version != kFormatVersion)
    throw format_error("unsupported sketch version " + std::to_string(version));
  Sketch sk;
  const auto kind = get<std::uint8_t>(in);
  const auto model = get<std::uint8_t>(in);
  if (kind > 1 || model > 1) throw format_error("bad kind/model byte");
  sk.kind = static_cast<SampleKind>(kind);
  sk.model = static_cast<Model>(model);
  sk.node_count = get<std::uint32_t>(in);
  const auto t = get<std::uint64_t>(in);
  const auto entries = get<std::uint64_t>(in);
  sk.gamma_total = get<double>(in);
  sk.graph_hash = get<std::uint64_t>(in);
  sk.node_gamma.resize(sk.node_count);
  for (std::uint32_t v = 0; v < sk.node_count; ++v) sk.node_gamma[v] = get<double>(in);
  Sample s;
  for (std::uint64_t j = 0; j < t; ++j) {
    const std::uint64_t len = get_varint(in);
    if (len == 0) throw format_error("empty sample record");
    s.nodes.resize(len);
    for (std::uint64_t i = 0; i < len; ++i) {
      s.nodes[i] = get<std::uint32_t>(in);
      if (s.nodes[i] >= sk.node_count) throw format_error("node id out of range");
    }
    s.source = s.nodes[0];
    std::sort(s.nodes.begin(), s.nodes.end());
    s.kind = sk.kind;
    sk.append(s);
  }
  if (sk.total_entries() != entries)
    throw format_error("entry count mismatch in sketch header");
  sk.rebuild_index();
  return sk;
}

}  // namespace skis
