#include "skis/sampler.hpp"

#include <algorithm>

#include "skis/errors.hpp"

namespace skis {

const char* to_string(SampleKind k) { return k == SampleKind::SKIS ? "skis" : "ris"; }

SampleKind sample_kind_from_string(const std::string& s) {
  if (s == "skis") return SampleKind::SKIS;
  if (s == "ris") return SampleKind::RIS;
  throw validation_error("unknown sketch kind '" + s + "'");
}

std::uint32_t draw_source(const GammaTable& table, RngStream& rng) {
  if (table.total <= 0.0)
    throw no_mass_error("source distribution has no mass (Gamma = 0)");
  const double u = rng.next_unit();
  const auto it =
      std::upper_bound(table.source_cdf.begin(), table.source_cdf.end(), u);
  const std::size_t idx = it == table.source_cdf.end()
                              ? table.source_cdf.size() - 1
                              : static_cast<std::size_t>(it - table.source_cdf.begin());
  return static_cast<std::uint32_t>(idx);
}

std::size_t select_bucket(std::span<const double> in_weights, double gamma_v,
                          RngStream& rng) {
  // Inverse-CDF walk over bucket masses surv * w_i; expected O(1) steps for
  // small weights since the mass is front-loaded.
  const double r = rng.next_unit() * gamma_v;
  double acc = 0.0;
  double surv = 1.0;
  for (std::size_t i = 0; i + 1 < in_weights.size(); ++i) {
    acc += surv * in_weights[i];
    if (r < acc) return i;
    surv *= 1.0 - in_weights[i];
  }
  return in_weights.size() - 1;
}

CascadeSampler::CascadeSampler(const ProbabilisticGraph& graph, const GammaTable& gamma)
    : graph_(&graph), gamma_(&gamma), visit_epoch_(graph.node_count(), 0) {}

void CascadeSampler::begin_visit() {
  if (++epoch_ == 0) {
    std::fill(visit_epoch_.begin(), visit_epoch_.end(), 0u);
    epoch_ = 1;
  }
  reached_.clear();
}

void CascadeSampler::finish(Sample& out, std::uint32_t source, SampleKind kind) {
  out.source = source;
  out.kind = kind;
  out.nodes.assign(reached_.begin(), reached_.end());
  out.nodes.push_back(source);
  std::sort(out.nodes.begin(), out.nodes.end());
}

void CascadeSampler::sample_iis(RngStream& rng, Sample& out) {
  if (graph_->model() == Model::IC)
    sample_iis_ic(rng, out);
  else
    sample_iis_lt(rng, out);
}

void CascadeSampler::sample_ris(RngStream& rng, Sample& out) {
  if (graph_->model() == Model::IC)
    sample_ris_ic(rng, out);
  else
    sample_ris_lt(rng, out);
}

void CascadeSampler::sample_iis_ic(RngStream& rng, Sample& out) {
  const std::uint32_t src = draw_source(*gamma_, rng);
  const auto nbrs = graph_->in_neighbors(src);
  const auto ws = graph_->in_weights(src);
  const std::size_t bucket = select_bucket(ws, gamma_->gamma[src], rng);

  begin_visit();
  visit(src);
  visit(nbrs[bucket]);
  reached_.push_back(nbrs[bucket]);
  // In-neighbors before the bucket are dead by construction; later ones get
  // an ordinary coin each.
  for (std::size_t t = bucket + 1; t < nbrs.size(); ++t) {
    if (rng.bernoulli(ws[t])) {
      visit(nbrs[t]);
      reached_.push_back(nbrs[t]);
    }
  }
  // FIFO expansion of everything queued so far.
  for (std::size_t head = 0; head < reached_.size(); ++head) {
    const std::uint32_t cur = reached_[head];
    const auto cn = graph_->in_neighbors(cur);
    const auto cw = graph_->in_weights(cur);
    for (std::size_t i = 0; i < cn.size(); ++i) {
      if (!visited(cn[i]) && rng.bernoulli(cw[i])) {
        visit(cn[i]);
        reached_.push_back(cn[i]);
      }
    }
  }
  finish(out, src, SampleKind::SKIS);
}

void CascadeSampler::sample_ris_ic(RngStream& rng, Sample& out) {
  if (graph_->node_count() == 0) throw validation_error("empty graph");
  const std::uint32_t src = rng.next_below(graph_->node_count());
  begin_visit();
  visit(src);
  std::size_t head = 0;
  std::uint32_t cur = src;
  while (true) {
    const auto cn = graph_->in_neighbors(cur);
    const auto cw = graph_->in_weights(cur);
    for (std::size_t i = 0; i < cn.size(); ++i) {
      if (!visited(cn[i]) && rng.bernoulli(cw[i])) {
        visit(cn[i]);
        reached_.push_back(cn[i]);
      }
    }
    if (head == reached_.size()) break;
    cur = reached_[head++];
  }
  finish(out, src, SampleKind::RIS);
}

bool CascadeSampler::lt_pick(std::uint32_t cur, RngStream& rng, std::uint32_t& picked) {
  const auto cn = graph_->in_neighbors(cur);
  const auto cw = graph_->in_weights(cur);
  if (cn.empty()) return false;
  const double r = rng.next_unit();
  double acc = 0.0;
  for (std::size_t i = 0; i < cn.size(); ++i) {
    acc += cw[i];
    if (r < acc) {
      picked = cn[i];
      return true;
    }
  }
  return false;  // landed in the 1 - sum(w) no-pick mass
}

void CascadeSampler::sample_iis_lt(RngStream& rng, Sample& out) {
  const std::uint32_t src = draw_source(*gamma_, rng);
  const auto nbrs = graph_->in_neighbors(src);
  const auto ws = graph_->in_weights(src);
  // First hop is unconditional: exactly one in-neighbor, picked w(u,v)/gamma_v.
  const double r = rng.next_unit() * gamma_->gamma[src];
  std::size_t first = nbrs.size() - 1;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < nbrs.size(); ++i) {
    acc += ws[i];
    if (r < acc) {
      first = i;
      break;
    }
  }
  begin_visit();
  visit(src);
  std::uint32_t cur = nbrs[first];
  visit(cur);
  reached_.push_back(cur);
  std::uint32_t next = 0;
  while (lt_pick(cur, rng, next)) {
    if (visited(next)) break;  // revisit halts the walk, node already reached
    visit(next);
    reached_.push_back(next);
    cur = next;
  }
  finish(out, src, SampleKind::SKIS);
}

void CascadeSampler::sample_ris_lt(RngStream& rng, Sample& out) {
  if (graph_->node_count() == 0) throw validation_error("empty graph");
  const std::uint32_t src = rng.next_below(graph_->node_count());
  begin_visit();
  visit(src);
  std::uint32_t cur = src;
  std::uint32_t next = 0;
  while (lt_pick(cur, rng, next)) {
    if (visited(next)) break;
    visit(next);
    reached_.push_back(next);
    cur = next;
  }
  finish(out, src, SampleKind::RIS);
}

}  // namespace skis
