#include "skis/graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <utility>

#include <json.hpp>

namespace skis {

namespace {

constexpr double kLtSumTolerance = 1e-9;
constexpr std::uint32_t kLogSpaceDegree = 32;

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ull;
  }
  return h;
}

template <typename T>
std::uint64_t fnv1a_value(std::uint64_t h, T v) {
  return fnv1a(h, &v, sizeof(v));
}

}  // namespace

const char* to_string(Model m) { return m == Model::IC ? "ic" : "lt"; }

const char* to_string(WeightMode m) {
  switch (m) {
    case WeightMode::Given:
      return "given";
    case WeightMode::WC:
      return "wc";
    case WeightMode::Tri:
      return "tri";
    case WeightMode::LtRandom:
      return "lt_random";
  }
  return "given";
}

Model model_from_string(const std::string& s) {
  if (s == "ic") return Model::IC;
  if (s == "lt") return Model::LT;
  throw validation_error("unknown model '" + s + "' (expected ic or lt)");
}

WeightMode weight_mode_from_string(const std::string& s) {
  if (s == "given") return WeightMode::Given;
  if (s == "wc") return WeightMode::WC;
  if (s == "tri") return WeightMode::Tri;
  if (s == "lt_random") return WeightMode::LtRandom;
  throw validation_error("unknown weight mode '" + s + "'");
}

ProbabilisticGraph::ProbabilisticGraph(Model model, std::uint32_t node_count,
                                       std::vector<Edge> edges)
    : model_(model), node_count_(node_count) {
  for (const Edge& e : edges) {
    if (e.from >= node_count_ || e.to >= node_count_)
      throw validation_error("edge endpoint out of range");
    if (e.from == e.to) throw validation_error("self-loop rejected");
    if (!(e.weight >= 0.0 && e.weight <= 1.0))
      throw validation_error("edge weight outside [0,1]");
  }
  // Canonical order: target-major, in-neighbors ascending.
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.to != b.to ? a.to < b.to : a.from < b.from;
  });
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (edges[i].to == edges[i - 1].to && edges[i].from == edges[i - 1].from)
      throw validation_error("duplicate edge rejected");
  }
  in_off_.assign(node_count_ + 1, 0);
  in_nbr_.reserve(edges.size());
  in_w_.reserve(edges.size());
  for (const Edge& e : edges) in_off_[e.to + 1]++;
  for (std::uint32_t v = 0; v < node_count_; ++v) in_off_[v + 1] += in_off_[v];
  for (const Edge& e : edges) {
    in_nbr_.push_back(e.from);
    in_w_.push_back(e.weight);
  }
  finalize();
}

void ProbabilisticGraph::finalize() {
  in_sum_.assign(node_count_, 0.0);
  for (std::uint32_t v = 0; v < node_count_; ++v) {
    double s = 0.0;
    for (double w : in_weights(v)) s += w;
    in_sum_[v] = s;
    if (model_ == Model::LT && s > 1.0 + kLtSumTolerance)
      throw validation_error("LT in-weight sum exceeds 1 at node " + std::to_string(v));
  }

  out_off_.assign(node_count_ + 1, 0);
  out_nbr_.assign(in_nbr_.size(), 0);
  out_w_.assign(in_nbr_.size(), 0.0);
  out_eid_.assign(in_nbr_.size(), 0);
  for (std::uint32_t u : in_nbr_) out_off_[u + 1]++;
  for (std::uint32_t v = 0; v < node_count_; ++v) out_off_[v + 1] += out_off_[v];
  std::vector<std::uint64_t> cursor(out_off_.begin(), out_off_.end() - 1);
  for (std::uint32_t v = 0; v < node_count_; ++v) {
    for (std::uint64_t i = in_off_[v]; i < in_off_[v + 1]; ++i) {
      const std::uint32_t u = in_nbr_[i];
      const std::uint64_t slot = cursor[u]++;
      out_nbr_[slot] = v;
      out_w_[slot] = in_w_[i];
      out_eid_[slot] = static_cast<std::uint32_t>(i);
    }
  }

  std::uint64_t h = 0xCBF29CE484222325ull;
  h = fnv1a_value(h, node_count_);
  h = fnv1a_value(h, static_cast<std::uint64_t>(in_nbr_.size()));
  h = fnv1a_value(h, static_cast<std::uint8_t>(model_));
  for (std::uint32_t v = 0; v < node_count_; ++v) {
    for (std::uint64_t i = in_off_[v]; i < in_off_[v + 1]; ++i) {
      h = fnv1a_value(h, v);
      h = fnv1a_value(h, in_nbr_[i]);
      h = fnv1a_value(h, std::bit_cast<std::uint64_t>(in_w_[i]));
    }
  }
  hash_ = h;
}

std::vector<ProbabilisticGraph::Edge> ProbabilisticGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(in_nbr_.size());
  for (std::uint32_t v = 0; v < node_count_; ++v) {
    for (std::uint64_t i = in_off_[v]; i < in_off_[v + 1]; ++i) {
      out.push_back({in_nbr_[i], v, in_w_[i]});
    }
  }
  return out;
}

void ProbabilisticGraph::replace_in_weights(std::vector<double> weights) {
  if (weights.size() != in_w_.size())
    throw validation_error("weight vector size does not match edge count");
  for (double w : weights) {
    if (!(w >= 0.0 && w <= 1.0)) throw validation_error("edge weight outside [0,1]");
  }
  in_w_ = std::move(weights);
  finalize();
}

GammaTable compute_gamma(const ProbabilisticGraph& graph) {
  const std::uint32_t n = graph.node_count();
  GammaTable table;
  table.gamma.assign(n, 0.0);
  for (std::uint32_t v = 0; v < n; ++v) {
    const auto ws = graph.in_weights(v);
    if (ws.empty()) continue;
    if (graph.model() == Model::LT) {
      table.gamma[v] = graph.in_weight_sum(v);
      continue;
    }
    bool certain = false;
    for (double w : ws) {
      if (w >= 1.0) {
        certain = true;
        break;
      }
    }
    if (certain) {
      table.gamma[v] = 1.0;
    } else if (ws.size() <= kLogSpaceDegree) {
      double miss = 1.0;
      for (double w : ws) miss *= 1.0 - w;
      table.gamma[v] = 1.0 - miss;
    } else {
      // Hub nodes: the survival product underflows, accumulate in log space.
      double log_miss = 0.0;
      for (double w : ws) log_miss += std::log1p(-w);
      table.gamma[v] = -std::expm1(log_miss);
    }
  }
  double total = 0.0;
  for (double g : table.gamma) total += g;
  table.total = total;
  table.source_cdf.assign(n, 0.0);
  if (total > 0.0) {
    double acc = 0.0;
    for (std::uint32_t v = 0; v < n; ++v) {
      acc += table.gamma[v];
      table.source_cdf[v] = acc / total;
    }
    table.source_cdf[n - 1] = 1.0;
  }
  return table;
}

ProbabilisticGraph load_edge_list(std::istream& in, Model model, WeightMode mode,
                                  std::uint64_t rng_seed) {
  std::vector<ProbabilisticGraph::Edge> edges;
  std::uint32_t max_id = 0;
  bool any_node = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    long long u = -1, v = -1;
    if (!(fields >> u >> v) || u < 0 || v < 0)
      throw parse_error(line_no, "expected 'u v' or 'u v w' with nonnegative ids");
    double w = 0.0;
    bool has_w = static_cast<bool>(fields >> w);
    std::string trailing;
    if (fields >> trailing) throw parse_error(line_no, "trailing tokens");
    if (mode == WeightMode::Given) {
      if (!has_w) throw parse_error(line_no, "weight column required in GIVEN mode");
      if (!(w >= 0.0 && w <= 1.0))
        throw validation_error("line " + std::to_string(line_no) +
                               ": weight outside [0,1]");
    }
    edges.push_back({static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v),
                     has_w ? w : 0.0});
    max_id = std::max({max_id, static_cast<std::uint32_t>(u),
                       static_cast<std::uint32_t>(v)});
    any_node = true;
  }
  const std::uint32_t n = any_node ? max_id + 1 : 0;

  if (mode != WeightMode::Given) {
    // Weights validated after assignment; keep placeholders legal meanwhile.
    for (auto& e : edges) e.weight = std::min(1.0, std::max(0.0, e.weight));
  }
  ProbabilisticGraph graph = [&] {
    if (model == Model::LT && mode != WeightMode::Given) {
      // Defer the LT sum check until real weights exist.
      ProbabilisticGraph g(Model::IC, n, std::move(edges));
      return g;
    }
    return ProbabilisticGraph(model, n, std::move(edges));
  }();

  switch (mode) {
    case WeightMode::Given:
      break;
    case WeightMode::WC:
      assign_weighted_cascade(graph);
      break;
    case WeightMode::Tri: {
      RngStream rng(rng_seed, 0);
      assign_trivalency(graph, rng);
      break;
    }
    case WeightMode::LtRandom: {
      if (model != Model::LT)
        throw validation_error("lt_random weights require the LT model");
      RngStream rng(rng_seed, 0);
      assign_lt_random(graph, rng);
      break;
    }
  }
  if (model == Model::LT && mode != WeightMode::Given) {
    // Rebuild under the real model so the LT sum invariant is enforced.
    std::vector<ProbabilisticGraph::Edge> es = graph.edges();
    graph = ProbabilisticGraph(Model::LT, n, std::move(es));
  }
  return graph;
}

void assign_weighted_cascade(ProbabilisticGraph& graph) {
  std::vector<double> w;
  w.reserve(graph.edge_count());
  for (std::uint32_t v = 0; v < graph.node_count(); ++v) {
    const double share = graph.in_degree(v) ? 1.0 / graph.in_degree(v) : 0.0;
    for (std::uint32_t i = 0; i < graph.in_degree(v); ++i) w.push_back(share);
  }
  graph.replace_in_weights(std::move(w));
}

void assign_trivalency(ProbabilisticGraph& graph, RngStream& rng) {
  static constexpr double kValues[3] = {0.1, 0.01, 0.001};
  std::vector<double> w;
  w.reserve(graph.edge_count());
  for (std::uint64_t i = 0; i < graph.edge_count(); ++i)
    w.push_back(kValues[rng.next_below(3)]);
  graph.replace_in_weights(std::move(w));
}

void assign_lt_random(ProbabilisticGraph& graph, RngStream& rng) {
  std::vector<double> w;
  w.reserve(graph.edge_count());
  for (std::uint32_t v = 0; v < graph.node_count(); ++v) {
    const auto prior = graph.in_weights(v);
    if (prior.empty()) continue;
    double prior_sum = 0.0;
    for (double p : prior) prior_sum += p;
    const double r = rng.next_unit();
    for (double p : prior) {
      const double share = prior_sum > 0.0 ? p / prior_sum : 1.0 / prior.size();
      w.push_back(r * share);
    }
  }
  graph.replace_in_weights(std::move(w));
}

void write_metadata(const GraphMetadata& meta, std::ostream& out) {
  nlohmann::json j;
  j["n"] = meta.node_count;
  j["m"] = meta.edge_count;
  j["model"] = to_string(meta.model);
  j["weight_mode"] = to_string(meta.weight_mode);
  j["seed"] = meta.rng_seed;
  char hash_hex[17];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                static_cast<unsigned long long>(meta.graph_hash));
  j["graph_hash"] = hash_hex;
  out << j.dump() << '\n';
}

GraphMetadata read_metadata(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw format_error(std::string("bad metadata JSON: ") + e.what());
  }
  GraphMetadata meta;
  try {
    meta.node_count = j.at("n").get<std::uint32_t>();
    meta.edge_count = j.at("m").get<std::uint64_t>();
    meta.model = model_from_string(j.at("model").get<std::string>());
    meta.weight_mode = weight_mode_from_string(j.at("weight_mode").get<std::string>());
    meta.rng_seed = j.at("seed").get<std::uint64_t>();
    meta.graph_hash =
        std::stoull(j.at("graph_hash").get<std::string>(), nullptr, 16);
  } catch (const nlohmann::json::exception& e) {
    throw format_error(std::string("bad metadata JSON: ") + e.what());
  }
  return meta;
}

}  // namespace skis
