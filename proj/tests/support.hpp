#ifndef COVERLOCK_TESTS_SUPPORT_HPP
#define COVERLOCK_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "coverlock/instance.hpp"
#include "coverlock/rng.hpp"

namespace coverlock::testing {

// The six-unit worked example used across the golden tests:
// v = (20,18,14,13,8,7), w = (10,9,4,4,2,2), W = 12, K = 2.
inline ProblemInstance worked_example() {
  ProblemInstance inst;
  inst.values = {20, 18, 14, 13, 8, 7};
  inst.costs = {10, 9, 4, 4, 2, 2};
  inst.budget = 12;
  inst.coverage_floor = 2;
  return inst;
}

// Feasible instance with all quantities on the 1/8 grid, so every sum any
// solver forms is exact in double and objective ties are exact ties.
inline ProblemInstance random_grid_instance(CounterRng& rng, std::size_t n) {
  ProblemInstance inst;
  inst.values.resize(n);
  inst.costs.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    inst.values[i] = static_cast<double>(static_cast<std::int64_t>(rng.next_u64() % 81) - 40) / 8.0;
    inst.costs[i] = static_cast<double>(rng.next_u64() % 40 + 1) / 8.0;
  }
  inst.coverage_floor = static_cast<std::int64_t>(rng.next_u64() % (n + 1));
  std::vector<double> sorted(inst.costs);
  std::sort(sorted.begin(), sorted.end());
  double min_cover = 0.0;
  for (std::int64_t k = 0; k < inst.coverage_floor; ++k) min_cover += sorted[k];
  inst.budget = min_cover + static_cast<double>(rng.next_u64() % 160 + 1) / 8.0;
  return inst;
}

// Feasible instance with continuous values/costs (no exact ties).
inline ProblemInstance random_continuous_instance(CounterRng& rng, std::size_t n) {
  ProblemInstance inst;
  inst.values.resize(n);
  inst.costs.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    inst.values[i] = rng.normal();
    inst.costs[i] = std::exp(0.8 * rng.normal());
  }
  inst.coverage_floor = static_cast<std::int64_t>(rng.next_u64() % (n + 1));
  std::vector<double> sorted(inst.costs);
  std::sort(sorted.begin(), sorted.end());
  double min_cover = 0.0;
  for (std::int64_t k = 0; k < inst.coverage_floor; ++k) min_cover += sorted[k];
  inst.budget = min_cover + 0.25 + 0.5 * rng.uniform() * (sorted.back() * n / 4.0);
  return inst;
}

}  // namespace coverlock::testing

#endif  // COVERLOCK_TESTS_SUPPORT_HPP
