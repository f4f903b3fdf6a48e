#include "skis/maximizer.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "skis/errors.hpp"
#include "skis/rng.hpp"

namespace skis {

namespace {

struct HeapEntry {
  double gain;
  std::uint32_t node;
  std::uint64_t round;  // selection round the gain was computed in
};

struct HeapLess {
  bool operator()(const HeapEntry& a, const HeapEntry& b) const {
    if (a.gain != b.gain) return a.gain < b.gain;
    return a.node > b.node;  // smaller id wins ties
  }
};

}  // namespace

GreedySolution greedy(const Sketch& sketch, std::uint32_t k) {
  const std::uint32_t n = sketch.node_count;
  if (k < 1 || k > n) throw validation_error("k must be in [1, n]");
  if (sketch.sample_count() == 0) throw validation_error("sketch has no samples");
  const std::uint64_t t = sketch.sample_count();
  const double t_d = static_cast<double>(t);
  const bool importance = sketch.kind == SampleKind::SKIS;
  const double scale =
      (importance ? sketch.gamma_total : static_cast<double>(n)) / t_d;
  const auto gain_of = [&](std::uint64_t delta_cover, std::uint32_t v) {
    const double base = static_cast<double>(delta_cover) * scale;
    return importance ? base + (1.0 - sketch.node_gamma[v]) : base;
  };

  std::vector<std::uint8_t> covered(t, 0);
  std::vector<std::uint8_t> selected(n, 0);
  std::priority_queue<HeapEntry, std::vector<HeapEntry>, HeapLess> heap;
  // Nothing is covered before round 1, so the initial gains are fresh for it.
  for (std::uint32_t v = 0; v < n; ++v)
    heap.push({gain_of(sketch.samples_containing(v).size(), v), v, 1});

  GreedySolution sol;
  sol.seeds.reserve(k);
  double additive_sum = 0.0;
  for (std::uint64_t round = 1; round <= k; ++round) {
    while (true) {
      HeapEntry top = heap.top();
      heap.pop();
      if (selected[top.node]) continue;
      if (top.round == round) {
        // Fresh this round: submodularity makes it optimal.
        selected[top.node] = 1;
        sol.seeds.push_back(top.node);
        sol.per_step_gains.push_back(top.gain);
        for (std::uint32_t j : sketch.samples_containing(top.node)) {
          if (!covered[j]) {
            covered[j] = 1;
            ++sol.covered;
          }
        }
        if (importance) additive_sum += 1.0 - sketch.node_gamma[top.node];
        break;
      }
      std::uint64_t delta = 0;
      for (std::uint32_t j : sketch.samples_containing(top.node))
        delta += covered[j] ? 0 : 1;
      heap.push({gain_of(delta, top.node), top.node, round});
    }
  }
  const double frac = static_cast<double>(sol.covered) / t_d;
  sol.objective = importance
                      ? frac * sketch.gamma_total + additive_sum
                      : frac * static_cast<double>(n);
  return sol;
}

namespace {

double log_choose(std::uint32_t n, std::uint32_t k) {
  return std::lgamma(static_cast<double>(n) + 1.0) -
         std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

std::uint64_t theta_common(std::uint32_t n, std::uint32_t k, double epsilon,
                           double delta, double opt_lower_bound, double kind_factor) {
  if (n == 0 || k < 1 || k > n) throw validation_error("k must be in [1, n]");
  if (!(epsilon > 0.0)) throw validation_error("epsilon must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw validation_error("delta must be in (0,1)");
  if (!(opt_lower_bound >= static_cast<double>(k)))
    throw validation_error("opt lower bound must be at least k");
  const double c = 2.0 + 2.0 * epsilon / 3.0;
  const double raw = kind_factor * c * (log_choose(n, k) + std::log(1.0 / delta)) *
                     (static_cast<double>(n) / opt_lower_bound) / (epsilon * epsilon);
  return static_cast<std::uint64_t>(std::ceil(raw));
}

}  // namespace

std::uint64_t theta_skis(std::uint32_t node_count, std::uint32_t k, double epsilon,
                         double delta, double gamma_total, double opt_lower_bound) {
  const double factor =
      (gamma_total + static_cast<double>(k)) / static_cast<double>(node_count);
  return theta_common(node_count, k, epsilon, delta, opt_lower_bound, factor);
}

std::uint64_t theta_ris(std::uint32_t node_count, std::uint32_t k, double epsilon,
                        double delta, double opt_lower_bound) {
  return theta_common(node_count, k, epsilon, delta, opt_lower_bound, 1.0);
}

namespace {

DssaResult dssa_driver(const ProbabilisticGraph& graph, const GammaTable& gamma,
                       std::uint32_t k, double epsilon, double delta,
                       std::uint64_t base_seed, unsigned worker_count,
                       SampleKind kind, double lambda2_override) {
  const std::uint32_t n = graph.node_count();
  constexpr double kOneMinusInvE = 0.6321205588285577;
  if (!(epsilon > 0.0 && epsilon < kOneMinusInvE))
    throw validation_error("epsilon must be in (0, 1 - 1/e)");
  if (!(delta > 0.0 && delta < 1.0)) throw validation_error("delta must be in (0,1)");
  if (k < 1 || k > n) throw validation_error("k must be in [1, n]");
  if (kind == SampleKind::SKIS && gamma.total <= 0.0)
    throw no_mass_error("cannot run on an importance sketch with Gamma = 0");

  const double coef = kind == SampleKind::SKIS
                          ? gamma.total / static_cast<double>(n)
                          : 1.0;
  const double eps2_inv = 1.0 / (epsilon * epsilon);
  const std::uint64_t n_max =
      kind == SampleKind::SKIS
          ? theta_skis(n, k, epsilon, delta, gamma.total, static_cast<double>(k))
          : theta_ris(n, k, epsilon, delta, static_cast<double>(k));
  // Lambda2 needs t_max and t_max needs the initial size; bootstrap t_max from
  // the t_max = 1 value of the same expression.
  const double lambda2_seed =
      (2.0 * coef + 2.0 * epsilon / 3.0) * std::log(3.0 / delta) * eps2_inv;
  const double lambda_seed = std::max(lambda2_seed, 32.0);
  const std::uint32_t t_max = static_cast<std::uint32_t>(std::max(
      1.0, 1.0 + std::ceil(std::log2(static_cast<double>(n_max) / lambda_seed))));
  const double lambda2 = lambda2_override > 0.0
                             ? lambda2_override
                             : (2.0 * coef + 2.0 * epsilon / 3.0) *
                                   std::log(3.0 * t_max / delta) * eps2_inv;
  const std::uint64_t lambda =
      static_cast<std::uint64_t>(std::max(std::ceil(lambda2), 32.0));

  const std::uint64_t seed_r = RngStream::mix64(base_seed ^ 0x52u);
  const std::uint64_t seed_c = RngStream::mix64(base_seed ^ 0x43u);
  Sketch r = make_empty_sketch(graph, gamma, kind);
  Sketch rc = make_empty_sketch(graph, gamma, kind);

  DssaResult res;
  res.epsilon = epsilon;
  res.delta = delta;
  for (std::uint32_t t = 1;; ++t) {
    const std::uint64_t size = lambda << (t - 1);
    extend_sketch(r, graph, gamma, size, seed_r, worker_count);
    extend_sketch(rc, graph, gamma, size, seed_c, worker_count);
    const GreedySolution cand = greedy(r, k);
    const Estimate check = estimate_influence(rc, cand.seeds);
    res.seeds = cand.seeds;
    res.iterations = t;
    res.samples_used = r.sample_count() + rc.sample_count();
    res.objective = check.value;

    const double pow_t = static_cast<double>(std::uint64_t{1} << (t - 1));
    const double e1 = cand.objective / check.value - 1.0;
    const double e2 = epsilon * std::sqrt(static_cast<double>(n) * (1.0 + epsilon) /
                                          (pow_t * check.value));
    const double e3 =
        epsilon * std::sqrt(static_cast<double>(n) * (1.0 + epsilon) *
                            (kOneMinusInvE - epsilon) /
                            ((1.0 + epsilon / 3.0) * pow_t * check.value));
    const double combined =
        (e1 + e2 + e1 * e2) * (kOneMinusInvE - epsilon) + kOneMinusInvE * e3;
    if (static_cast<double>(cand.covered) >= lambda2 && combined <= epsilon) {
      res.guarantee_capped = false;
      return res;
    }
    if (size >= n_max) {
      res.guarantee_capped = true;
      return res;
    }
  }
}

}  // namespace

DssaResult dssa_skis(const ProbabilisticGraph& graph, const GammaTable& gamma,
                     std::uint32_t k, double epsilon, double delta,
                     std::uint64_t base_seed, unsigned worker_count,
                     double lambda2_override) {
  return dssa_driver(graph, gamma, k, epsilon, delta, base_seed, worker_count,
                     SampleKind::SKIS, lambda2_override);
}

DssaResult dssa_ris(const ProbabilisticGraph& graph, const GammaTable& gamma,
                    std::uint32_t k, double epsilon, double delta,
                    std::uint64_t base_seed, unsigned worker_count,
                    double lambda2_override) {
  return dssa_driver(graph, gamma, k, epsilon, delta, base_seed, worker_count,
                     SampleKind::RIS, lambda2_override);
}

}  // namespace skis
