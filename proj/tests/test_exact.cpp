#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "coverlock/exact.hpp"
#include "support.hpp"

using namespace coverlock;
using testing::worked_example;

TEST_CASE("worked example optimum is 42 on units {3,4,5,6}") {
  // Exhaustive enumeration of all 2^6 subsets gives the same answer.
  const SolveReport exact = solve_exact(worked_example());
  const SolveReport brute = solve_exhaustive(worked_example());
  CHECK(exact.objective == 42.0);
  CHECK(brute.objective == 42.0);
  const std::vector<std::uint8_t> expected = {0, 0, 1, 1, 1, 1};
  CHECK(exact.allocation.decisions() == expected);
  CHECK(brute.allocation.decisions() == expected);
  CHECK(exact.budget_used == 12.0);
  CHECK(exact.budget_binding);
  CHECK(exact.optimal);
}

TEST_CASE("forced singleton and least-bad coverage") {
  ProblemInstance one;
  one.values = {5};
  one.costs = {1};
  one.budget = 1;
  one.coverage_floor = 1;
  CHECK(solve_exact(one).objective == 5.0);
  CHECK(solve_exact(one).allocation.treated(0));

  ProblemInstance bad;
  bad.values = {-3, -1};
  bad.costs = {1, 1};
  bad.budget = 2;
  bad.coverage_floor = 1;
  const SolveReport report = solve_exact(bad);
  CHECK(report.objective == -1.0);
  CHECK_FALSE(report.allocation.treated(0));
  CHECK(report.allocation.treated(1));
}

TEST_CASE("exhaustive corner cases") {
  ProblemInstance rich = worked_example();
  rich.budget = 100;
  rich.coverage_floor = 0;
  CHECK(solve_exhaustive(rich).allocation.count() == 6);  // all values positive

  ProblemInstance forced = worked_example();
  forced.values = {-1, -2, -3, -4, -5, -6};
  forced.budget = 100;
  forced.coverage_floor = 6;
  CHECK(solve_exhaustive(forced).allocation.count() == 6);

  ProblemInstance big;
  big.values.assign(26, 1.0);
  big.costs.assign(26, 1.0);
  big.budget = 5;
  big.coverage_floor = 0;
  CHECK_THROWS_AS(solve_exhaustive(big), Error);

  ProblemInstance infeasible;
  infeasible.values = {1, 1};
  infeasible.costs = {10, 9};
  infeasible.budget = 12;
  infeasible.coverage_floor = 2;
  CHECK_THROWS_AS(solve_exhaustive(infeasible), Error);
  CHECK_THROWS_AS(solve_exact(infeasible), Error);
}

TEST_CASE("branch and bound equals exhaustive search on random grid instances") {
  CounterRng rng(2024);
  int done = 0;
  while (done < 1200) {
    const std::size_t n = 4 + rng.next_u64() % 12;  // 4..15
    const ProblemInstance inst = testing::random_grid_instance(rng, n);
    const SolveReport fast = solve_exact(inst);
    const SolveReport brute = solve_exhaustive(inst);
    REQUIRE(fast.objective == brute.objective);  // grid sums: exact equality
    REQUIRE(fast.allocation.decisions() == brute.allocation.decisions());
    REQUIRE(fast.feasible);
    ++done;
  }
}

TEST_CASE("returned allocations are always feasible") {
  CounterRng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const ProblemInstance inst = testing::random_continuous_instance(rng, 14);
    const SolveReport report = solve_exact(inst);
    CHECK(report.budget_used <= inst.budget * (1.0 + kBudgetRelTol));
    CHECK(report.coverage_used >= inst.coverage_floor);
  }
}

TEST_CASE("objective is monotone in budget and antitone in the floor") {
  CounterRng rng(47);
  for (int trial = 0; trial < 60; ++trial) {
    ProblemInstance inst = testing::random_grid_instance(rng, 12);
    const double base = solve_exact(inst).objective;

    ProblemInstance richer = inst;
    richer.budget += 1.0;
    CHECK(solve_exact(richer).objective >= base);

    if (inst.coverage_floor > 0) {
      ProblemInstance looser = inst;
      looser.coverage_floor -= 1;
      CHECK(solve_exact(looser).objective >= base);
    }
  }
}

TEST_CASE("pruned subtrees never contain a better completion") {
  CounterRng rng(53);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 6 + rng.next_u64() % 5;  // 6..10
    const ProblemInstance inst = testing::random_grid_instance(rng, n);

    PruneLog log;
    ExactOptions options;
    options.prune_log = &log;
    const SolveReport report = solve_exact(inst, options);

    for (const PrunedNode& node : log) {
      // Enumerate every completion of the pruned node and confirm the bound
      // dominates the best feasible one.
      std::vector<std::size_t> free_units;
      for (std::size_t i = 0; i < n; ++i) {
        if (node.is_free[i]) free_units.push_back(i);
      }
      double best = -1e300;
      for (std::uint32_t mask = 0; mask < (1u << free_units.size()); ++mask) {
        std::vector<std::uint8_t> decisions = node.fixed;
        for (std::size_t b = 0; b < free_units.size(); ++b) {
          decisions[free_units[b]] = (mask >> b) & 1u;
        }
        const auto m = allocation_metrics(inst, std::span<const std::uint8_t>(decisions));
        if (m.feasible) best = std::max(best, m.value);
      }
      if (best > -1e300) {
        CHECK(node.upper_bound >= best - 1e-9);
        CHECK(node.upper_bound < node.incumbent);  // it was pruned for a reason
      }
    }
    CHECK(report.objective == solve_exhaustive(inst).objective);
  }
}

TEST_CASE("node budget exhaustion degrades to best-found") {
  CounterRng rng(61);
  const ProblemInstance inst = testing::random_grid_instance(rng, 14);
  ExactOptions options;
  options.node_budget = 0;  // force the degraded path regardless of fixing
  const SolveReport report = solve_exact(inst, options);
  CHECK_FALSE(report.optimal);
  CHECK(report.feasible);
  CHECK(report.objective <= solve_exact(inst).objective);
}
