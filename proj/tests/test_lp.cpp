#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "coverlock/exact.hpp"
#include "coverlock/lp.hpp"
#include "support.hpp"

using namespace coverlock;
using testing::worked_example;

namespace {

void check_lp_invariants(const ProblemInstance& inst, const LpSolution& sol) {
  REQUIRE(sol.fractional_indices.size() <= 2);
  CHECK(sol.allocation.cost() <= inst.budget * (1.0 + 1e-9));
  CHECK(sol.allocation.mass() >= static_cast<double>(inst.coverage_floor) - 1e-9);
  const double scale = 1e-7 * std::max(1.0, std::abs(sol.objective));
  CHECK(std::abs(sol.prices.lambda * (sol.allocation.cost() - inst.budget)) <= scale);
  CHECK(std::abs(sol.prices.nu *
                 (static_cast<double>(inst.coverage_floor) - sol.allocation.mass())) <= scale);
  CHECK(sol.prices.lambda >= 0.0);
  CHECK(sol.prices.nu >= 0.0);
}

}  // namespace

TEST_CASE("worked example relaxes to an integral optimum of 42") {
  const LpSolution sol = solve_lp(worked_example());
  CHECK(sol.objective == doctest::Approx(42.0).epsilon(1e-12));
  CHECK(sol.fractional_indices.empty());
  for (const std::size_t i : {2, 3, 4, 5}) CHECK(sol.allocation.weights()[i] == 1.0);
  for (const std::size_t i : {0, 1}) CHECK(sol.allocation.weights()[i] == 0.0);
  check_lp_invariants(worked_example(), sol);
}

TEST_CASE("two-unit split example") {
  ProblemInstance inst;
  inst.values = {10, 6};
  inst.costs = {4, 3};
  inst.budget = 5;
  inst.coverage_floor = 1;
  const LpSolution sol = solve_lp(inst);
  CHECK(sol.objective == doctest::Approx(12.0).epsilon(1e-12));
  CHECK(sol.allocation.weights()[0] == 1.0);
  CHECK(sol.allocation.weights()[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(sol.fractional_indices.size() == 1);
  CHECK(sol.prices.lambda == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(sol.prices.nu == 0.0);
  CHECK(enumerate_extreme_points_oracle(inst).objective == doctest::Approx(12.0).epsilon(1e-9));
}

TEST_CASE("slack instance takes everything at zero prices") {
  ProblemInstance inst = worked_example();
  inst.budget = 100;
  inst.coverage_floor = 0;
  const LpSolution sol = solve_lp(inst);
  CHECK(sol.allocation.mass() == 6.0);
  CHECK(sol.prices.lambda == 0.0);
  CHECK(sol.prices.nu == 0.0);
}

TEST_CASE("single-unit budget cap splits the coordinate") {
  ProblemInstance inst;
  inst.values = {2};
  inst.costs = {1};
  inst.budget = 0.5;
  inst.coverage_floor = 0;
  const LpSolution sol = solve_lp(inst);
  CHECK(sol.allocation.weights()[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sol.objective == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(enumerate_extreme_points_oracle(inst).objective == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("oracle equivalence on random instances") {
  CounterRng rng(77);
  int done = 0;
  while (done < 1100) {
    const std::size_t n = 3 + rng.next_u64() % 8;  // 3..10
    const ProblemInstance inst = done % 2 == 0 ? testing::random_grid_instance(rng, n)
                                               : testing::random_continuous_instance(rng, n);
    const LpSolution sol = solve_lp(inst);
    const LpSolution oracle = enumerate_extreme_points_oracle(inst);
    REQUIRE(std::abs(sol.objective - oracle.objective) <= 1e-8);
    check_lp_invariants(inst, sol);
    ++done;
  }
}

TEST_CASE("relaxation dominates the exact optimum") {
  CounterRng rng(79);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 4 + rng.next_u64() % 12;  // 4..15
    const ProblemInstance inst = testing::random_grid_instance(rng, n);
    const double lp = solve_lp(inst).objective;
    const double opt = solve_exhaustive(inst).objective;
    double v_max = 0.0;
    for (const double v : inst.values) v_max = std::max(v_max, std::abs(v));
    REQUIRE(lp >= opt);
    REQUIRE(lp - opt <= 2.0 * v_max + 1e-9);
  }
}

TEST_CASE("integrality gap worked values") {
  CHECK(integrality_gap(worked_example()) == doctest::Approx(0.0).epsilon(1e-12));

  ProblemInstance inst;
  inst.values = {10, 6};
  inst.costs = {4, 3};
  inst.budget = 5;
  inst.coverage_floor = 1;
  CHECK(integrality_gap(inst) == doctest::Approx(2.0).epsilon(1e-12));  // 12 - 10
}

TEST_CASE("per-capita gap vanishes along nested instances") {
  CounterRng rng(83);
  for (const std::size_t n : {50u, 100u, 200u, 400u}) {
    const ProblemInstance inst = testing::random_continuous_instance(rng, n);
    const double gap = integrality_gap(inst);
    double v_max = 0.0;
    for (const double v : inst.values) v_max = std::max(v_max, std::abs(v));
    CHECK(gap >= 0.0);
    CHECK(gap / n <= 2.0 * v_max / n);
  }
}

TEST_CASE("solutions carry a full optimality certificate at scale") {
  // Primal feasibility, dual feasibility and complementary slackness
  // together certify optimality, so this checks the solver at sizes the
  // enumeration oracle cannot reach.
  CounterRng rng(401);
  int pinned_cases = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 500;
    ProblemInstance inst;
    inst.values.resize(n);
    inst.costs.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = rng.normal();
      inst.values[i] = x + 0.5 * x * x;
      inst.costs[i] = 1.0 + std::abs(x);
    }
    inst.coverage_floor = static_cast<std::int64_t>(n / 2);
    inst.budget = 0.8 * static_cast<double>(n);

    const LpSolution sol = solve_lp(inst);
    const double tol = 1e-7 * std::max(1.0, std::abs(sol.objective));
    REQUIRE(sol.allocation.cost() <= inst.budget + tol);
    REQUIRE(sol.allocation.mass() >= static_cast<double>(inst.coverage_floor) - 1e-9);
    for (std::size_t i = 0; i < n; ++i) {
      const double score = lagrangian_score(inst, i, sol.prices);
      const double z = sol.allocation.weights()[i];
      if (z >= 1.0 - kFractionalBand) {
        REQUIRE(score >= -tol);  // treated units must clear the boundary
      } else if (z <= kFractionalBand) {
        REQUIRE(score <= tol);
      } else {
        REQUIRE(std::abs(score) <= tol);  // split units sit on it exactly
      }
    }
    REQUIRE(std::abs(sol.prices.lambda * (sol.allocation.cost() - inst.budget)) <= tol);
    REQUIRE(std::abs(sol.prices.nu * (static_cast<double>(inst.coverage_floor) -
                                      sol.allocation.mass())) <= tol);
    if (sol.coverage_pinned) ++pinned_cases;
  }
  CHECK(pinned_cases > 20);  // the binding regime must actually be exercised
}

TEST_CASE("rounding an integral solution changes nothing") {
  const LpSolution sol = solve_lp(worked_example());
  const BinaryAllocation rounded = round_lp_to_feasible(sol, worked_example());
  const std::vector<std::uint8_t> expected = {0, 0, 1, 1, 1, 1};
  CHECK(rounded.decisions() == expected);
}

TEST_CASE("rounding drops a fractional coordinate when coverage allows") {
  ProblemInstance inst;
  inst.values = {10, 6};
  inst.costs = {4, 3};
  inst.budget = 5;
  inst.coverage_floor = 1;
  const BinaryAllocation rounded = round_lp_to_feasible(solve_lp(inst), inst);
  CHECK(rounded.treated(0));
  CHECK_FALSE(rounded.treated(1));
  CHECK(rounded.value() == 10.0);
}

TEST_CASE("a binding floor forces every unit of the three-unit example") {
  ProblemInstance inst;
  inst.values = {5, 1, 1};
  inst.costs = {2, 2, 2};
  inst.budget = 6;
  inst.coverage_floor = 3;
  const LpSolution sol = solve_lp(inst);
  const BinaryAllocation rounded = round_lp_to_feasible(sol, inst);
  CHECK(rounded.count() == 3);
  CHECK(rounded.value() == 7.0);
}

TEST_CASE("rounding restores a binding floor and keeps the gap bound") {
  CounterRng rng(89);
  int coverage_bound_cases = 0;
  for (int trial = 0; trial < 600; ++trial) {
    const std::size_t n = 4 + rng.next_u64() % 9;
    const ProblemInstance inst = testing::random_continuous_instance(rng, n);
    const LpSolution sol = solve_lp(inst);
    const BinaryAllocation rounded = round_lp_to_feasible(sol, inst);
    const auto metrics = allocation_metrics(inst, rounded);
    REQUIRE(metrics.feasible);
    double v_max = 0.0;
    for (const double v : inst.values) v_max = std::max(v_max, std::abs(v));
    REQUIRE(rounded.value() >= sol.objective - 2.0 * v_max - 1e-9);
    if (sol.coverage_pinned) ++coverage_bound_cases;
  }
  CHECK(coverage_bound_cases > 50);  // the generator must actually exercise phase B
}
