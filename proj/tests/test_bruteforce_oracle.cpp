#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "secretgame/bruteforce_oracle.hpp"
#include "secretgame/capped_solver.hpp"
#include "secretgame/costly_solver.hpp"

using namespace secretgame;

TEST_CASE("capped_best_dictionary enumerates exactly") {
  {
    const auto [subset, value] =
        capped_best_dictionary(PerSecretMix({0.5, 0.3, 0.2}), 2, 1.0);
    CHECK(value == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(subset == std::vector<std::size_t>{0, 1});
  }
  {
    const auto [subset, value] = capped_best_dictionary(
        PerSecretMix({0.25, 0.25, 0.25, 0.25}), 2, 3.0);
    CHECK(value == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(subset.size() == 2);
  }
  {
    const auto [subset, value] =
        capped_best_dictionary(PerSecretMix({0.0, 1.0, 0.0}), 1, 2.0);
    CHECK(subset == std::vector<std::size_t>{1});
    CHECK(value == 2.0);
  }
  CHECK_THROWS_AS(
      capped_best_dictionary(PerSecretMix(std::vector<double>(21, 1.0 / 21)),
                             3, 1.0),
      model_error);
}

TEST_CASE("costly_best_sequence enumerates the plan space") {
  const CostlyParams params{1.0, 2.0, 1.0};
  {
    const auto [seq, value] =
        costly_best_sequence(PerSecretMix({0.5, 0.3, 0.2}), params);
    CHECK(value == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(seq == std::vector<std::size_t>{0, 1, 2});
  }
  {
    const auto [seq, value] = costly_best_sequence(
        PerSecretMix({0.4, 0.3, 0.3}), CostlyParams{1.0, 0.5, 1.0});
    CHECK(seq.empty());  // gamma < sigma: every guess loses money
    CHECK(value == 0.0);
  }
  {
    const auto [seq, value] = costly_best_sequence(
        PerSecretMix({1.0 / 3, 1.0 / 3, 1.0 / 3}), CostlyParams{1.0, 5.0, 2.0});
    CHECK(seq.size() == 3);
    CHECK(value == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(
      costly_best_sequence(PerSecretMix(std::vector<double>(8, 0.125)),
                           params),
      model_error);
}

TEST_CASE("exhaustive ne verification cross-checks the closed form") {
  const PartitionProfile p({{3, 0.0}, {3, 1.0}});
  const CappedParams params{3.0, 1.0, 2};
  const SolveReport report = solve_ne(p, params);
  CHECK(verify_capped_ne_exhaustive(p, params, report.picker_strategy,
                                    *report.guesser_marginals, 1e-9));

  // shifting 10% of picker mass toward the cheap partition invites the
  // guesser to concentrate there
  const PickerMix shifted({0.6, 0.4}, p);
  CHECK(!verify_capped_ne_exhaustive(p, params, shifted,
                                     *report.guesser_marginals, 1e-9));

  const PartitionProfile defeat({{1, 0.0}, {3, 10.0}});
  const CappedParams dp{1.0, 1.0, 1};
  const SolveReport dr = solve_ne(defeat, dp);
  CHECK(verify_capped_ne_exhaustive(defeat, dp, dr.picker_strategy,
                                    *dr.guesser_marginals, 1e-9));

  const PartitionProfile big({{13, 0.0}});
  CHECK_THROWS_AS(
      verify_capped_ne_exhaustive(big, CappedParams{1.0, 1.0, 1},
                                  PickerMix({1.0}, big),
                                  GuesserMarginals({1.0 / 13}, big), 1e-9),
      model_error);
}

TEST_CASE("capped simulation agrees with the analytic utilities") {
  const PartitionProfile p({{3, 0.0}, {3, 1.0}});
  const CappedParams params{3.0, 1.0, 2};
  const SolveReport report = solve_ne(p, params);
  const SimResult sim = simulate(p, params, report.picker_strategy,
                                 *report.guesser_marginals, 200000, 12345);
  CHECK(std::abs(sim.picker_mean - (-1.5)) <= 4 * sim.picker_se);
  CHECK(std::abs(sim.guesser_mean - 1.0 / 3) <= 4 * sim.guesser_se);
  // deterministic under a fixed seed
  const SimResult again = simulate(p, params, report.picker_strategy,
                                   *report.guesser_marginals, 1000, 42);
  const SimResult again2 = simulate(p, params, report.picker_strategy,
                                    *report.guesser_marginals, 1000, 42);
  CHECK(again.picker_mean == again2.picker_mean);

  const GuesserMarginals zero({0.0, 0.0}, p);
  const SimResult idle =
      simulate(p, params, report.picker_strategy, zero, 2000, 7);
  CHECK(idle.guesser_mean == 0.0);
  CHECK(idle.guesser_se == 0.0);
}

TEST_CASE("costly simulation agrees with the plan formula") {
  const PartitionProfile p({{3, 0.0}});
  const CostlyParams params{1.0, 5.0, 2.0};
  const PickerMix delta({1.0}, p);
  ExplorationPlan plan;
  plan.batches.push_back({0, 3});
  const SimResult sim = simulate(p, params, delta, plan, 400000, 999);
  CHECK(std::abs(sim.guesser_mean - 1.0) <= 4 * sim.guesser_se);

  const PartitionProfile two({{2, 0.1}, {2, 0.6}});
  const PickerMix mix({0.7, 0.3}, two);
  ExplorationPlan partial;
  partial.batches.push_back({0, 2});
  partial.batches.push_back({1, 1});
  const CostlyParams cp{2.0, 3.0, 0.5};
  const double analytic = eval_costly_plan(two, cp, mix, partial);
  const SimResult sim2 = simulate(two, cp, mix, partial, 400000, 31337);
  CHECK(std::abs(sim2.guesser_mean - analytic) <= 4 * sim2.guesser_se);
  // picker side: found with probability (batch coverage), losing lambda
  const double find_prob = 0.7 + 0.3 / 2;
  const double analytic_picker =
      -(0.1 * 0.7 + 0.6 * 0.3) - cp.lambda * find_prob;
  CHECK(std::abs(sim2.picker_mean - analytic_picker) <= 4 * sim2.picker_se);
}

TEST_CASE("small lp vertex enumeration") {
  {
    const SmallLpOptimum best = lp_check_small(
        PartitionProfile({{2, 0.0}, {4, 1.0}}), CostlyParams{10.0, 2.0, 1.0});
    CHECK(best.objective == doctest::Approx(-0.2).epsilon(1e-9));
    CHECK(best.nu[0] == doctest::Approx(0.8).epsilon(1e-9));
    CHECK(best.nu[1] == doctest::Approx(0.2).epsilon(1e-9));
  }
  {
    const SmallLpOptimum best = lp_check_small(PartitionProfile({{5, 0.0}}),
                                               CostlyParams{1.0, 2.0, 1.0});
    CHECK(best.objective == 0.0);
    CHECK(best.nu[0] == doctest::Approx(1.0).epsilon(1e-12));
  }
  {
    // gamma < sigma: every prefix constraint is slack, cheapest vertex wins
    const SmallLpOptimum best =
        lp_check_small(PartitionProfile({{1, 0.0}, {1, 1.0}}),
                       CostlyParams{1.0, 0.4, 1.0});
    CHECK(best.objective == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(best.nu[0] == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(
      lp_check_small(PartitionProfile({{1, 0.0}, {1, 0.1}, {1, 0.2}, {1, 0.3}}),
                     CostlyParams{1.0, 1.0, 1.0}),
      model_error);
}

TEST_CASE("structure theorem holds on random per-secret mixes") {
  std::mt19937_64 rng(555);
  std::uniform_int_distribution<std::size_t> nd(1, 7);
  for (int trial = 0; trial < 500; ++trial) {
    const PerSecretMix flat = random_per_secret(rng, nd(rng));
    const CostlyParams params{log_uniform(rng), log_uniform(rng),
                              log_uniform(rng)};
    const double structured = best_response(flat.probs(), params).second;
    const double enumerated = costly_best_sequence(flat, params).second;
    CHECK(std::abs(structured - enumerated) <= 1e-9);
  }
}

TEST_CASE("capped closed form equals enumeration on random mixes") {
  std::mt19937_64 rng(556);
  std::uniform_int_distribution<std::size_t> nd(2, 12);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = nd(rng);
    const PerSecretMix flat = random_per_secret(rng, n);
    std::uniform_int_distribution<std::uint64_t> capd(1, n - 1);
    const std::uint64_t cap = capd(rng);
    // closed form: gamma times the top-K mass
    std::vector<double> sorted = flat.probs();
    std::sort(sorted.rbegin(), sorted.rend());
    double top = 0.0;
    for (std::uint64_t k = 0; k < cap; ++k) top += sorted[k];
    const double enumerated = capped_best_dictionary(flat, cap, 1.7).second;
    CHECK(enumerated == doctest::Approx(1.7 * top).epsilon(1e-12));
  }
}

TEST_CASE("run_verification passes on seeded batches") {
  const auto suites = run_verification(424242, 60);
  REQUIRE(suites.size() == 4);
  for (const auto& s : suites) {
    INFO(s.name, ": ", s.first_failure);
    CHECK(s.failed == 0);
    if (s.name != "capped_oracle") CHECK(s.passed == 60);
  }
}
