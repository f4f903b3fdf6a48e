#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fixtures.hpp"
#include "skis/errors.hpp"
#include "skis/evaluator.hpp"

using namespace skis;
using skis::testing::load_fixture;

TEST_CASE("exact influence on the pair and path graphs") {
  const auto pair = load_fixture("pair_ic");
  const std::uint32_t u[] = {0}, v[] = {1}, both[] = {0, 1};
  CHECK(exact_influence(pair, {u, 1}).value == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(exact_influence(pair, {v, 1}).value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(exact_influence(pair, {both, 2}).value == doctest::Approx(2.0).epsilon(1e-14));

  const auto path = load_fixture("path3_ic");
  const std::uint32_t a[] = {0};
  CHECK(exact_influence(path, {a, 1}).value == doctest::Approx(1.11).epsilon(1e-14));
  const std::uint32_t all[] = {0, 1, 2};
  CHECK(exact_influence(path, {all, 3}).value == doctest::Approx(3.0).epsilon(1e-14));
  const auto t = exact_influence(path, {a, 1});
  CHECK(t.method == TruthMethod::Exact);
  CHECK(t.epsilon == 0.0);
  CHECK(t.delta == 0.0);
}

TEST_CASE("exact influence under the linear threshold model") {
  const auto fork = load_fixture("fork_lt");
  const std::uint32_t z[] = {0};
  // 1 + 0.3 + 0.3 * 0.5
  CHECK(exact_influence(fork, {z, 1}).value == doctest::Approx(1.45).epsilon(1e-12));
  const auto path = load_fixture("path3_lt");
  // 1 + 0.4 + 0.4 * 0.7
  CHECK(exact_influence(path, {z, 1}).value == doctest::Approx(1.68).epsilon(1e-12));
}

TEST_CASE("exact influence is monotone and at least |S|") {
  const auto g = load_fixture("diamond_ic");
  for (std::uint32_t v = 0; v < g.node_count(); ++v) {
    const std::uint32_t single[] = {v};
    const double base = exact_influence(g, {single, 1}).value;
    CHECK(base >= 1.0);
    CHECK(base <= g.node_count());
    for (std::uint32_t w = 0; w < g.node_count(); ++w) {
      if (w == v) continue;
      const std::uint32_t dbl[] = {v, w};
      CHECK(exact_influence(g, {dbl, 2}).value >= base - 1e-12);
    }
  }
}

TEST_CASE("exact influence enforces the enumeration limits") {
  std::ostringstream text;
  for (int i = 0; i < 23; ++i) text << i << ' ' << i + 1 << " 0.5\n";
  std::istringstream in(text.str());
  const auto g = load_edge_list(in, Model::IC, WeightMode::Given, 0);
  CHECK_FALSE(exact_influence_feasible(g));
  const std::uint32_t s[] = {0};
  CHECK_THROWS_AS(exact_influence(g, {s, 1}), size_error);
}

TEST_CASE("stopping threshold regression value") {
  // eps = 0.005, delta = 1/75000: recomputed independently.
  CHECK(mc_stopping_threshold(0.005, 1.0 / 75000) ==
        doctest::Approx(1369722.139699167).epsilon(1e-12));
}

TEST_CASE("monte carlo influence hits exact values") {
  const auto g = load_fixture("pair_ic");
  const std::uint32_t all[] = {0, 1};
  // Z_j = 1 for every cascade: the estimate is exactly n.
  const auto full = monte_carlo_influence(g, {all, 2}, 0.05, 0.05, 1, 1);
  CHECK(full.value == 2.0);
  CHECK(full.samples_used >= mc_stopping_threshold(0.05, 0.05));

  const std::uint32_t u[] = {0};
  const auto est = monte_carlo_influence(g, {u, 1}, 0.05, 0.05, 1, 2);
  CHECK(std::abs(est.value - 1.5) / 1.5 < 0.05);
  CHECK(est.method == TruthMethod::McStoppingRule);
}

TEST_CASE("monte carlo influence is worker-invariant") {
  const auto g = load_fixture("varcore_ic");
  const std::uint32_t s[] = {0, 4};
  const auto a = monte_carlo_influence(g, {s, 2}, 0.1, 0.1, 9, 1);
  const auto b = monte_carlo_influence(g, {s, 2}, 0.1, 0.1, 9, 4);
  CHECK(a.value == b.value);
  CHECK(a.samples_used == b.samples_used);
}

TEST_CASE("monte carlo influence under LT tracks the exact oracle") {
  const auto g = load_fixture("fork_lt");
  const std::uint32_t z[] = {0};
  const auto est = monte_carlo_influence(g, {z, 1}, 0.05, 0.05, 4, 2);
  CHECK(std::abs(est.value - 1.45) / 1.45 < 0.05);
}

TEST_CASE("relative difference definition") {
  CHECK(relative_difference(1.5, 1.5) == 0.0);
  CHECK(relative_difference(2.0, 1.0) == doctest::Approx(50.0));
  CHECK(relative_difference(1.0, 2.0) == doctest::Approx(50.0));
  CHECK(relative_difference(0.0, 0.0) == 0.0);
}

TEST_CASE("estimation benchmark emits query, aggregate, and histogram rows") {
  const auto g = load_fixture("varcore_ic");
  const auto gamma = compute_gamma(g);
  BenchIeConfig cfg;
  cfg.h_values = {5.0};
  cfg.set_sizes = {1, 2};
  cfg.query_count = 3;
  cfg.workers = 1;
  std::ostringstream out;
  bench_ie(g, gamma, cfg, out);
  const std::string csv = out.str();
  CHECK(csv.find("row_type,kind,h,") == 0);
  CHECK(csv.find("\nquery,skis,5,") != std::string::npos);
  CHECK(csv.find("\naggregate,ris,5,") != std::string::npos);
  CHECK(csv.find("\nhist,skis,5,") != std::string::npos);
  CHECK(csv.find("exact") != std::string::npos);  // fixtures use the exact oracle

  // Zero queries leave just the header.
  cfg.query_count = 0;
  std::ostringstream empty;
  bench_ie(g, gamma, cfg, empty);
  CHECK(empty.str() == "row_type,kind,h,T,total_entries,set_size,query,truth_method,"
                       "truth,estimate,rel_diff_pct,bin_low,bin_high,count\n");
}

TEST_CASE("selection benchmark puts the star center in every row") {
  const auto g = load_fixture("star_ic");
  const auto gamma = compute_gamma(g);
  BenchImConfig cfg;
  cfg.k_values = {1};
  cfg.budgets = {64};
  cfg.trials = 2;
  cfg.eval_epsilon = 0.2;
  cfg.eval_delta = 0.1;
  cfg.workers = 1;
  cfg.timing = false;
  std::ostringstream out;
  bench_im(g, gamma, cfg, out);
  std::istringstream lines(out.str());
  std::string line;
  std::getline(lines, line);  // header
  CHECK(line == "row_type,algo,k,budget,trial,samples,influence,runtime_sec,"
                "memory_bytes,seeds");
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    CHECK(line.substr(line.size() - 1) == "0");  // seed column is the center
    CHECK(line.find(",0,") != std::string::npos);  // runtime zeroed
  }
  CHECK(rows == 2 * 3);  // trials x algos (greedy_skis, greedy_ris, dssa)
}

TEST_CASE("preferential attachment generator yields a loadable skewed graph") {
  auto edges = generate_preferential_attachment(500, 3, 0.35, 42);
  ProbabilisticGraph g(Model::IC, 500, std::move(edges));
  assign_weighted_cascade(g);
  const auto gamma = compute_gamma(g);
  CHECK(g.edge_count() >= 3 * (500 - 4));
  CHECK(gamma.gamma0() > 0.05);
  CHECK(gamma.gamma0() < 0.95);
  std::uint32_t max_out = 0;
  for (std::uint32_t v = 0; v < g.node_count(); ++v)
    max_out = std::max(max_out, g.out_degree(v));
  CHECK(max_out > 20);  // hubs exist
}
