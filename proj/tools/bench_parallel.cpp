// Compares the OpenMP sketch/simulation kernels against the serial reference
// on a generated scale-free graph and verifies they produce identical bytes.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <thread>

#include "skis/evaluator.hpp"
#include "skis/graph.hpp"
#include "skis/oracle.hpp"
#include "skis/sketch.hpp"

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string sketch_bytes(const skis::Sketch& sk) {
  std::ostringstream out;
  skis::serialize_sketch(sk, out);
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
  std::uint32_t n = 100000;
  std::uint64_t samples = 200000;
  if (argc > 1) n = static_cast<std::uint32_t>(std::strtoul(argv[1], nullptr, 10));
  if (argc > 2) samples = std::strtoull(argv[2], nullptr, 10);
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());

  std::printf("graph: preferential attachment, n=%u, attach=3\n", n);
  auto edges = skis::generate_preferential_attachment(n, 3, 0.35, 99);
  skis::ProbabilisticGraph graph(skis::Model::IC, n, std::move(edges));
  skis::assign_weighted_cascade(graph);
  const skis::GammaTable gamma = skis::compute_gamma(graph);
  std::printf("m=%llu, Gamma/n=%.3f, workers=%u\n",
              static_cast<unsigned long long>(graph.edge_count()),
              gamma.gamma0(), hw);

  const auto policy = skis::GrowthPolicy::fixed_count(samples);
  for (const skis::SampleKind kind :
       {skis::SampleKind::SKIS, skis::SampleKind::RIS}) {
    auto t0 = clock_type::now();
    const skis::Sketch serial = skis::build_sketch_serial(graph, gamma, kind, policy, 7);
    const double t_serial = seconds_since(t0);

    t0 = clock_type::now();
    const skis::Sketch parallel = skis::build_sketch(graph, gamma, kind, policy, 7, hw);
    const double t_parallel = seconds_since(t0);

    const bool same = sketch_bytes(serial) == sketch_bytes(parallel);
    std::printf("build %-4s  %12llu samples  serial %7.3fs  omp %7.3fs  "
                "speedup %.2fx  identical=%s\n",
                skis::to_string(kind), static_cast<unsigned long long>(samples),
                t_serial, t_parallel, t_serial / t_parallel, same ? "yes" : "NO");
    if (!same) return 1;
  }

  const std::vector<std::uint32_t> seeds{0, 1, 2};
  auto t0 = clock_type::now();
  const auto mc1 = skis::monte_carlo_influence(graph, seeds, 0.02, 0.01, 7, 1);
  const double t_serial = seconds_since(t0);
  t0 = clock_type::now();
  const auto mcN = skis::monte_carlo_influence(graph, seeds, 0.02, 0.01, 7, hw);
  const double t_parallel = seconds_since(t0);
  std::printf("mc_influence %9llu sims     serial %7.3fs  omp %7.3fs  "
              "speedup %.2fx  identical=%s\n",
              static_cast<unsigned long long>(mcN.samples_used), t_serial, t_parallel,
              t_serial / t_parallel, mc1.value == mcN.value ? "yes" : "NO");
  return mc1.value == mcN.value ? 0 : 1;
}
