#pragma once

#include <cstdint>
#include <span>

#include "skis/sketch.hpp"

namespace skis {

/// An influence estimate in expected-node units.
struct Estimate {
  double value = 0.0;
  std::uint64_t coverage = 0;
  std::uint64_t samples = 0;  // T
  SampleKind kind = SampleKind::SKIS;
  double additive_term = 0.0;  // sum over seeds of (1 - gamma_v); 0 for RIS
};

/// Importance sketch: value = coverage/T * Gamma + sum(1 - gamma_v).
/// Plain sketch:      value = coverage/T * n.
Estimate estimate_influence(const Sketch& sketch, std::span<const std::uint32_t> seed_set);

/// Samples sufficient for a (epsilon, delta) multiplicative estimate of any
/// set whose influence is at least `influence_lower_bound`:
/// ceil((2*Gamma/n + 2*eps/3) * ln(2/delta) * (n / lb) / eps^2).
std::uint64_t required_samples(double gamma_total, std::uint32_t node_count,
                               double influence_lower_bound, double epsilon,
                               double delta);

/// Variance diagnostics for the two per-sample estimators. Needs a truth
/// source, so it lives in evaluator/benchmark flows, not the query path.
struct VarianceReport {
  double var_z_exact = 0.0;      // closed form; needs true influence
  double var_z_bound = 0.0;      // (I/n)(Gamma/n)
  double var_y = 0.0;            // plain Bernoulli variance (I/n)(1 - I/n)
  double empirical_var_z = 0.0;  // from the importance-sketch indicator stream
  double empirical_var_y = 0.0;  // from the plain-sketch indicator stream
  bool clamped = false;          // closed form went slightly negative
};

VarianceReport variance_report(const ProbabilisticGraph& graph, const GammaTable& gamma,
                               std::span<const std::uint32_t> seed_set,
                               double true_influence, const Sketch& sketch_skis,
                               const Sketch& sketch_ris);

enum class TailSide { Upper, Lower };

/// Chernoff-style tail mass of a T-sample estimate missing by a relative
/// epsilon. Upper: exp(-eps^2 T / (2*Gamma/n + 2*eps/3) * I/n);
/// lower: exp(-eps^2 T / (2*Gamma/n) * I/n).
double concentration_tail(double samples, double epsilon, double gamma_over_n,
                          double influence_over_n, TailSide side);

}  // namespace skis
