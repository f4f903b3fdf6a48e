#include "skis/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "skis/errors.hpp"

namespace skis {

Estimate estimate_influence(const Sketch& sketch, std::span<const std::uint32_t> seed_set) {
  if (sketch.sample_count() == 0) throw validation_error("sketch has no samples");
  if (seed_set.empty()) throw validation_error("seed set is empty");
  std::vector<std::uint32_t> seeds(seed_set.begin(), seed_set.end());
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
  Estimate est;
  est.kind = sketch.kind;
  est.samples = sketch.sample_count();
  est.coverage = sketch.coverage(seeds);
  const double frac =
      static_cast<double>(est.coverage) / static_cast<double>(est.samples);
  if (sketch.kind == SampleKind::SKIS) {
    double additive = 0.0;
    for (std::uint32_t v : seeds) additive += 1.0 - sketch.node_gamma[v];
    est.additive_term = additive;
    est.value = frac * sketch.gamma_total + additive;
  } else {
    est.additive_term = 0.0;
    est.value = frac * static_cast<double>(sketch.node_count);
  }
  return est;
}

std::uint64_t required_samples(double gamma_total, std::uint32_t node_count,
                               double influence_lower_bound, double epsilon,
                               double delta) {
  if (!(epsilon > 0.0)) throw validation_error("epsilon must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw validation_error("delta must be in (0,1)");
  if (!(influence_lower_bound > 0.0))
    throw validation_error("influence lower bound must be positive");
  if (node_count == 0) throw validation_error("node count must be positive");
  const double n = static_cast<double>(node_count);
  const double coef = 2.0 * gamma_total / n + 2.0 * epsilon / 3.0;
  const double t = coef * std::log(2.0 / delta) * (n / influence_lower_bound) /
                   (epsilon * epsilon);
  return static_cast<std::uint64_t>(std::ceil(t));
}

VarianceReport variance_report(const ProbabilisticGraph& graph, const GammaTable& gamma,
                               std::span<const std::uint32_t> seed_set,
                               double true_influence, const Sketch& sketch_skis,
                               const Sketch& sketch_ris) {
  const double n = static_cast<double>(graph.node_count());
  const double big_gamma = gamma.total;
  double additive = 0.0;
  for (std::uint32_t v : seed_set) {
    if (v >= graph.node_count())
      throw validation_error("unknown node id " + std::to_string(v));
    additive += 1.0 - gamma.gamma[v];
  }
  const double i_n = true_influence / n;

  VarianceReport rep;
  rep.var_z_bound = i_n * big_gamma / n;
  rep.var_y = i_n * (1.0 - i_n);
  const double raw = i_n * big_gamma / n - i_n * i_n -
                     additive / (n * n) * (big_gamma + additive - 2.0 * true_influence);
  if (raw < 0.0) {
    rep.var_z_exact = 0.0;
    rep.clamped = true;
  } else {
    rep.var_z_exact = raw;
  }

  // The indicator streams are 0/1 per sample, so the Bessel-corrected sample
  // variance collapses to a closed form of the coverage fraction.
  const auto bernoulli_var = [](std::uint64_t cover, std::uint64_t t) {
    if (t < 2) return 0.0;
    const double p = static_cast<double>(cover) / static_cast<double>(t);
    return p * (1.0 - p) * static_cast<double>(t) / static_cast<double>(t - 1);
  };
  const std::uint64_t t_z = sketch_skis.sample_count();
  const std::uint64_t t_y = sketch_ris.sample_count();
  const double scale_z = big_gamma / n;
  rep.empirical_var_z =
      scale_z * scale_z * bernoulli_var(sketch_skis.coverage(seed_set), t_z);
  rep.empirical_var_y = bernoulli_var(sketch_ris.coverage(seed_set), t_y);
  return rep;
}

double concentration_tail(double samples, double epsilon, double gamma_over_n,
                          double influence_over_n, TailSide side) {
  const double denom = side == TailSide::Upper
                           ? 2.0 * gamma_over_n + 2.0 * epsilon / 3.0
                           : 2.0 * gamma_over_n;
  return std::exp(-epsilon * epsilon * samples / denom * influence_over_n);
}

}  // namespace skis
