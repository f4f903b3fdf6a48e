#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "skis/errors.hpp"
#include "skis/oracle.hpp"

using namespace skis;
using skis::testing::load_fixture;

TEST_CASE("pair-graph estimates are exact for any sketch size") {
  const auto g = load_fixture("pair_ic");
  const auto gamma = compute_gamma(g);
  for (std::uint64_t t : {std::uint64_t{1}, std::uint64_t{7}, std::uint64_t{100}}) {
    const auto sk =
        build_sketch(g, gamma, SampleKind::SKIS, GrowthPolicy::fixed_count(t), t, 1);
    const std::uint32_t u[] = {0}, v[] = {1};
    CHECK(estimate_influence(sk, {u, 1}).value == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(estimate_influence(sk, {v, 1}).value == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("path head estimate converges to 1.11") {
  const auto g = load_fixture("path3_ic");
  const auto gamma = compute_gamma(g);
  const auto sk = build_sketch(g, gamma, SampleKind::SKIS,
                               GrowthPolicy::fixed_count(200000), 1, 2);
  const std::uint32_t a[] = {0};
  const auto est = estimate_influence(sk, {a, 1});
  CHECK(est.additive_term == 1.0);
  CHECK(std::abs(est.value - 1.11) / 1.11 < 0.01);
}

TEST_CASE("plain estimates scale coverage by n") {
  const auto g = load_fixture("pair_ic");
  const auto gamma = compute_gamma(g);
  const auto sk = build_sketch(g, gamma, SampleKind::RIS,
                               GrowthPolicy::fixed_count(200000), 2, 2);
  const std::uint32_t u[] = {0};
  const auto est = estimate_influence(sk, {u, 1});
  CHECK(est.additive_term == 0.0);
  CHECK(est.value ==
        doctest::Approx(2.0 * est.coverage / est.samples).epsilon(1e-15));
  CHECK(std::abs(est.value - 1.5) / 1.5 < 0.01);
}

TEST_CASE("estimate input validation") {
  const auto g = load_fixture("pair_ic");
  const auto gamma = compute_gamma(g);
  const auto empty = make_empty_sketch(g, gamma, SampleKind::SKIS);
  const std::uint32_t u[] = {0};
  CHECK_THROWS_AS(estimate_influence(empty, {u, 1}), validation_error);
  const auto sk =
      build_sketch(g, gamma, SampleKind::SKIS, GrowthPolicy::fixed_count(4), 1, 1);
  CHECK_THROWS_AS(estimate_influence(sk, {}), validation_error);
  const std::uint32_t bad[] = {5};
  CHECK_THROWS_AS(estimate_influence(sk, {bad, 1}), validation_error);
}

TEST_CASE("estimator decomposition stays within bounds") {
  const auto g = load_fixture("varcore_ic");
  const auto gamma = compute_gamma(g);
  const auto sk = build_sketch(g, gamma, SampleKind::SKIS,
                               GrowthPolicy::fixed_count(5000), 3, 2);
  RngStream rng(4, 0);
  for (int i = 0; i < 50; ++i) {
    std::vector<std::uint32_t> seeds;
    for (std::uint32_t v = 0; v < g.node_count(); ++v)
      if (rng.bernoulli(0.4)) seeds.push_back(v);
    if (seeds.empty()) seeds.push_back(rng.next_below(g.node_count()));
    const auto est = estimate_influence(sk, seeds);
    CHECK(est.value >= est.additive_term);
    CHECK(est.additive_term >= 0.0);
    CHECK(est.value - est.additive_term <= gamma.total + 1e-12);
  }
}

TEST_CASE("required_samples frozen value and scaling") {
  // Gamma/n = 0.2, n = 1000, lb = 1, eps = 0.1, delta = 0.01:
  // (0.4 + 1/15) * ln 200 * 1000 * 100 = 247254.81...
  CHECK(required_samples(200.0, 1000, 1.0, 0.1, 0.01) == 247255);

  // Degenerate Gamma = n: coefficient becomes 2 + 2 eps/3.
  const double eps = 0.1, delta = 0.01;
  const std::uint64_t t = required_samples(1000.0, 1000, 1.0, eps, delta);
  const double expect =
      std::ceil((2.0 + 2.0 * eps / 3.0) * std::log(2.0 / delta) * 1000.0 / (eps * eps));
  CHECK(t == static_cast<std::uint64_t>(expect));

  // Doubling the lower bound halves the requirement (up to ceiling slack).
  const std::uint64_t t1 = required_samples(200.0, 1000, 1.0, 0.1, 0.01);
  const std::uint64_t t2 = required_samples(200.0, 1000, 2.0, 0.1, 0.01);
  CHECK(std::llabs(static_cast<long long>(t1) - 2ll * static_cast<long long>(t2)) <= 2);

  CHECK_THROWS_AS(required_samples(200.0, 1000, 0.0, 0.1, 0.01), validation_error);
  CHECK_THROWS_AS(required_samples(200.0, 1000, 1.0, -0.1, 0.01), validation_error);
  CHECK_THROWS_AS(required_samples(200.0, 1000, 1.0, 0.1, 1.5), validation_error);
}

TEST_CASE("variance report on the degenerate pair graph") {
  const auto g = load_fixture("pair_ic");
  const auto gamma = compute_gamma(g);
  const auto skis_sk = build_sketch(g, gamma, SampleKind::SKIS,
                                    GrowthPolicy::fixed_count(20000), 5, 1);
  const auto ris_sk = build_sketch(g, gamma, SampleKind::RIS,
                                   GrowthPolicy::fixed_count(20000), 6, 1);
  const std::uint32_t u[] = {0};
  const auto rep = variance_report(g, gamma, {u, 1}, 1.5, skis_sk, ris_sk);
  // The importance estimator is constant here: variance exactly zero.
  CHECK(rep.var_z_exact == 0.0);
  CHECK(rep.var_z_bound == doctest::Approx(0.1875).epsilon(1e-15));
  CHECK(rep.var_y == doctest::Approx(0.1875).epsilon(1e-15));
  CHECK(rep.empirical_var_z == 0.0);
  CHECK(rep.empirical_var_y ==
        doctest::Approx(rep.var_y).epsilon(0.05));
  CHECK(rep.var_z_exact <= rep.var_z_bound);
}

TEST_CASE("concentration tails") {
  // Vanishing epsilon gives no concentration at all.
  CHECK(concentration_tail(1000, 1e-12, 0.2, 0.5, TailSide::Upper) ==
        doctest::Approx(1.0).epsilon(1e-9));

  // With T from the sample calculator at the true influence, upper + lower
  // mass is at most delta.
  const double gamma_n = 0.2, inf = 5.0, eps = 0.1, delta = 0.01;
  const std::uint32_t n = 1000;
  const auto t = required_samples(gamma_n * n, n, inf, eps, delta);
  const double up =
      concentration_tail(double(t), eps, gamma_n, inf / n, TailSide::Upper);
  const double low =
      concentration_tail(double(t), eps, gamma_n, inf / n, TailSide::Lower);
  CHECK(up + low <= delta);
  CHECK(up <= delta / 2 * 1.0000001);

  // Gamma/n = 1 reduces to the plain-sketch coefficients.
  const double plain =
      std::exp(-eps * eps * 100.0 / (2.0 + 2.0 * eps / 3.0) * 0.3);
  CHECK(concentration_tail(100.0, eps, 1.0, 0.3, TailSide::Upper) ==
        doctest::Approx(plain).epsilon(1e-12));
}
