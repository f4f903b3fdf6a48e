#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "enumerate.hpp"
#include "fixtures.hpp"
#include "skis/errors.hpp"
#include "skis/sampler.hpp"

using namespace skis;
using skis::testing::load_fixture;

namespace {

double binom_sigma(double p, double n) { return std::sqrt(p * (1.0 - p) / n); }

}  // namespace

TEST_CASE("draw_source requires mass") {
  const auto g = testing::load_fixture("pair_ic");
  GammaTable empty;
  empty.gamma.assign(g.node_count(), 0.0);
  empty.total = 0.0;
  RngStream rng(1, 1);
  CHECK_THROWS_AS(draw_source(empty, rng), no_mass_error);
}

TEST_CASE("draw_source matches gamma_v / Gamma on the 3-path") {
  const auto g = load_fixture("path3_ic");
  const auto gamma = compute_gamma(g);
  RngStream rng(17, 0);
  const int n = 1000000;
  int counts[3] = {0, 0, 0};
  for (int i = 0; i < n; ++i) counts[draw_source(gamma, rng)]++;
  CHECK(counts[0] == 0);  // gamma_a = 0: never a source
  CHECK(std::abs(counts[1] / double(n) - 0.5) < 3 * binom_sigma(0.5, n));
  CHECK(std::abs(counts[2] / double(n) - 0.5) < 3 * binom_sigma(0.5, n));
}

TEST_CASE("draw_source on a single positive-gamma node always returns it") {
  const auto g = load_fixture("pair_ic");
  const auto gamma = compute_gamma(g);
  RngStream rng(3, 0);
  for (int i = 0; i < 200; ++i) CHECK(draw_source(gamma, rng) == 1);
}

TEST_CASE("select_bucket distribution") {
  RngStream rng(23, 1);
  const int n = 200000;

  SUBCASE("equal halves") {
    const double ws[2] = {0.5, 0.5};
    int first = 0;
    for (int i = 0; i < n; ++i) first += select_bucket({ws, 2}, 0.75, rng) == 0;
    CHECK(std::abs(first / double(n) - 2.0 / 3) < 4 * binom_sigma(2.0 / 3, n));
  }
  SUBCASE("certain first edge") {
    const double ws[2] = {1.0, 0.4};
    for (int i = 0; i < 100; ++i) CHECK(select_bucket({ws, 2}, 1.0, rng) == 0);
  }
  SUBCASE("0.3 / 0.4 case") {
    const double ws[2] = {0.3, 0.4};
    const double p2 = 0.7 * 0.4 / 0.58;  // 0.48276
    int second = 0;
    for (int i = 0; i < n; ++i) second += select_bucket({ws, 2}, 0.58, rng) == 1;
    CHECK(std::abs(second / double(n) - p2) < 4 * binom_sigma(p2, n));
  }
}

TEST_CASE("importance samples on the pair graph are always {v,u}") {
  const auto g = load_fixture("pair_ic");
  const auto gamma = compute_gamma(g);
  CascadeSampler sampler(g, gamma);
  Sample s;
  for (std::uint64_t j = 0; j < 500; ++j) {
    RngStream rng(5, j);
    sampler.sample_iis_ic(rng, s);
    CHECK(s.source == 1);
    REQUIRE(s.nodes.size() == 2);
    CHECK(s.nodes[0] == 0);
    CHECK(s.nodes[1] == 1);
  }
}

TEST_CASE("importance samples from the path tail include the head 10% of the time") {
  const auto g = load_fixture("path3_ic");
  const auto gamma = compute_gamma(g);
  CascadeSampler sampler(g, gamma);
  Sample s;
  int from_c = 0, with_a = 0;
  const int n = 200000;
  for (std::uint64_t j = 0; j < n; ++j) {
    RngStream rng(6, j);
    sampler.sample_iis_ic(rng, s);
    if (s.source != 2) continue;
    ++from_c;
    REQUIRE(s.nodes.size() >= 2);
    with_a += s.nodes.front() == 0;
  }
  REQUIRE(from_c > n / 3);
  const double frac = with_a / double(from_c);
  CHECK(std::abs(frac - 0.1) < 4 * binom_sigma(0.1, from_c));
}

TEST_CASE("importance samples are never singular and contain their source") {
  for (const auto& spec : testing::fixture_specs()) {
    const auto g = load_fixture(spec);
    const auto gamma = compute_gamma(g);
    CascadeSampler sampler(g, gamma);
    Sample s;
    for (std::uint64_t j = 0; j < 2000; ++j) {
      RngStream rng(8, j);
      sampler.sample_iis(rng, s);
      REQUIRE(s.nodes.size() >= 2);
      CHECK(std::binary_search(s.nodes.begin(), s.nodes.end(), s.source));
      CHECK(std::adjacent_find(s.nodes.begin(), s.nodes.end()) == s.nodes.end());
    }
  }
}

TEST_CASE("plain sampling singular fraction converges to 1 - Gamma/n") {
  const auto g = load_fixture("pair_ic");
  const auto gamma = compute_gamma(g);
  CascadeSampler sampler(g, gamma);
  Sample s;
  const int n = 100000;
  int singular = 0;
  for (std::uint64_t j = 0; j < n; ++j) {
    RngStream rng(9, j);
    sampler.sample_ris_ic(rng, s);
    singular += s.nodes.size() == 1;
  }
  CHECK(std::abs(singular / double(n) - 0.75) < 3 * binom_sigma(0.75, n));
}

TEST_CASE("plain sampling reproduces influence via the coverage identity") {
  // n * Pr[R cap {u} nonempty] should converge to the exact influence 1.5.
  const auto g = load_fixture("pair_ic");
  const auto gamma = compute_gamma(g);
  CascadeSampler sampler(g, gamma);
  Sample s;
  const int n = 1000000;
  int hit = 0;
  for (std::uint64_t j = 0; j < n; ++j) {
    RngStream rng(10, j);
    sampler.sample_ris_ic(rng, s);
    hit += std::binary_search(s.nodes.begin(), s.nodes.end(), 0u);
  }
  const double est = 2.0 * hit / double(n);
  CHECK(std::abs(est - 1.5) / 1.5 < 0.01);
}

TEST_CASE("LT first hop follows w/gamma") {
  const auto g = load_fixture("fork_lt");
  const auto gamma = compute_gamma(g);
  CascadeSampler sampler(g, gamma);
  Sample s;
  int from2 = 0, via0 = 0;
  const int n = 200000;
  for (std::uint64_t j = 0; j < n; ++j) {
    RngStream rng(11, j);
    sampler.sample_iis_lt(rng, s);
    if (s.source != 2) continue;
    ++from2;
    via0 += std::binary_search(s.nodes.begin(), s.nodes.end(), 0u);
  }
  REQUIRE(from2 > 1000);
  const double frac = via0 / double(from2);
  CHECK(std::abs(frac - 3.0 / 7) < 4 * binom_sigma(3.0 / 7, from2));
}

TEST_CASE("LT cycle walk halts on revisit") {
  const auto g = load_fixture("cycle2_lt");
  const auto gamma = compute_gamma(g);
  CascadeSampler sampler(g, gamma);
  Sample s;
  for (std::uint64_t j = 0; j < 2000; ++j) {
    RngStream rng(12, j);
    sampler.sample_iis_lt(rng, s);
    REQUIRE(s.nodes.size() == 2);  // {src, other}, revisit stops the walk
  }
}

TEST_CASE("LT plain sampling on the pair graph splits 50/50") {
  const auto pairs = std::string("0 1 0.5\n");
  std::istringstream in(pairs);
  const auto g = load_edge_list(in, Model::LT, WeightMode::Given, 0);
  const auto gamma = compute_gamma(g);
  CascadeSampler sampler(g, gamma);
  Sample s;
  int nonsingular = 0, from_v = 0;
  const int n = 100000;
  for (std::uint64_t j = 0; j < n; ++j) {
    RngStream rng(13, j);
    sampler.sample_ris_lt(rng, s);
    if (s.source == 1) {
      ++from_v;
      nonsingular += s.nodes.size() == 2;
    } else {
      CHECK(s.nodes.size() == 1);  // node 0 has no in-edges
    }
  }
  const double frac = nonsingular / double(from_v);
  CHECK(std::abs(frac - 0.5) < 4 * binom_sigma(0.5, from_v));
}

TEST_CASE("identical seed and stream give identical samples") {
  for (const char* name : {"diamond_ic", "fork_lt"}) {
    const auto g = load_fixture(name);
    const auto gamma = compute_gamma(g);
    CascadeSampler s1(g, gamma), s2(g, gamma);
    Sample a, b;
    for (std::uint64_t j = 0; j < 500; ++j) {
      RngStream r1(77, j), r2(77, j);
      s1.sample_iis(r1, a);
      s2.sample_iis(r2, b);
      REQUIRE(a.source == b.source);
      REQUIRE(a.nodes == b.nodes);
    }
  }
}

TEST_CASE("importance sampling matches the conditioned exhaustive distribution") {
  // Spot-check the smallest fixtures here; the acceptance suite covers all.
  for (const char* name : {"cycle2_ic", "fork_lt"}) {
    const auto g = load_fixture(name);
    const auto gamma = compute_gamma(g);
    const auto ris = testing::enumerate_ris_space(g);
    std::map<testing::OutcomeKey, double> expected;
    for (const auto& [key, p] : ris) {
      if (key.second.size() >= 2)
        expected[key] = p * g.node_count() / gamma.total;
    }
    CascadeSampler sampler(g, gamma);
    Sample s;
    std::map<testing::OutcomeKey, int> observed;
    const int n = 200000;
    for (std::uint64_t j = 0; j < n; ++j) {
      RngStream rng(14, j);
      sampler.sample_iis(rng, s);
      observed[{s.source, s.nodes}]++;
    }
    for (const auto& [key, count] : observed)
      REQUIRE(expected.count(key) == 1);  // nothing outside the support
    for (const auto& [key, p] : expected) {
      const double freq = observed[key] / double(n);
      CHECK(std::abs(freq - p) < 4 * binom_sigma(p, n) + 1e-12);
    }
  }
}
