#pragma once

#include <cstdint>
#include <vector>

#include "skis/oracle.hpp"
#include "skis/sketch.hpp"

namespace skis {

struct GreedySolution {
  std::vector<std::uint32_t> seeds;  // selection order
  double objective = 0.0;            // sketch estimate of the selected set
  std::vector<double> per_step_gains;
  std::uint64_t covered = 0;  // samples intersected by the selected set
};

/// Lazy (priority-queue) greedy over a fixed sketch. Importance sketches use
/// gain(v, S) = delta_coverage / T * Gamma + (1 - gamma_v); plain sketches use
/// delta_coverage / T * n. Ties break toward the smaller node id.
GreedySolution greedy(const Sketch& sketch, std::uint32_t k);

struct DssaResult {
  std::vector<std::uint32_t> seeds;
  std::uint64_t samples_used = 0;  // across both sketches
  std::uint32_t iterations = 0;
  double objective = 0.0;  // re-estimate on the checking sketch
  bool guarantee_capped = false;
  double epsilon = 0.0;
  double delta = 0.0;
};

/// Stop-and-stare driver on doubling importance sketches: greedy candidate on
/// one sketch, independent re-estimate on the other, adaptive error terms
/// eps1/eps2/eps3 against the target (epsilon, delta). Hits a hard sample cap
/// of theta_skis(opt lower bound = k) and flags the result when capped.
/// lambda2_override > 0 replaces the derived coverage threshold
/// (2 Gamma/n + 2 eps/3) ln(3 t_max / delta) / eps^2.
DssaResult dssa_skis(const ProbabilisticGraph& graph, const GammaTable& gamma,
                     std::uint32_t k, double epsilon, double delta,
                     std::uint64_t base_seed, unsigned worker_count,
                     double lambda2_override = 0.0);

/// Same driver on plain reverse-reachability sketches (for comparisons).
DssaResult dssa_ris(const ProbabilisticGraph& graph, const GammaTable& gamma,
                    std::uint32_t k, double epsilon, double delta,
                    std::uint64_t base_seed, unsigned worker_count,
                    double lambda2_override = 0.0);

/// Sample threshold for a (1 - 1/e - epsilon) guarantee with importance
/// samples: ceil((Gamma + k)/n * c * (ln C(n,k) + ln(1/delta)) * n/lb / eps^2)
/// with c = 2 + 2*eps/3. ln C(n,k) goes through log-gamma.
std::uint64_t theta_skis(std::uint32_t node_count, std::uint32_t k, double epsilon,
                         double delta, double gamma_total, double opt_lower_bound);

/// The plain-sketch threshold (the (Gamma + k)/n factor dropped).
std::uint64_t theta_ris(std::uint32_t node_count, std::uint32_t k, double epsilon,
                        double delta, double opt_lower_bound);

}  // namespace skis
