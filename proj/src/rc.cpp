#include "coverlock/rc.hpp"

#include <algorithm>
#include <limits>

#include "coverlock/detail/order.hpp"

namespace coverlock {

RankedOrder rank_by_ratio(const ProblemInstance& inst) {
  validate_instance(inst);
  RankedOrder ranked;
  ranked.permutation = detail::ratio_descending_order(inst.values, inst.costs);
  const std::size_t n = inst.size();
  ranked.scores.resize(n);
  ranked.cumulative_value.resize(n);
  ranked.cumulative_cost.resize(n);
  double value = 0.0, cost = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = ranked.permutation[k];
    ranked.scores[k] = inst.values[i] / inst.costs[i];
    value += inst.values[i];
    cost += inst.costs[i];
    ranked.cumulative_value[k] = value;
    ranked.cumulative_cost[k] = cost;
  }
  return ranked;
}

SolveReport rc_prefix_solve(const ProblemInstance& inst) {
  const RankedOrder ranked = rank_by_ratio(inst);
  const std::size_t n = inst.size();
  const auto floor_k = static_cast<std::size_t>(inst.coverage_floor);
  const double cap = inst.budget * (1.0 + kBudgetRelTol);

  // Empty prefix counts only when the floor allows it.
  bool found = floor_k == 0;
  std::size_t best_k = 0;
  double best_value = found ? 0.0 : -std::numeric_limits<double>::infinity();
  for (std::size_t k = std::max<std::size_t>(floor_k, 1); k <= n; ++k) {
    if (ranked.cumulative_cost[k - 1] > cap) continue;
    if (ranked.cumulative_value[k - 1] > best_value) {
      best_value = ranked.cumulative_value[k - 1];
      best_k = k;
      found = true;
    }
  }
  if (!found) {
    throw Error(ErrorKind::kNoFeasibleCutoff, "no ranking prefix meets both constraints");
  }

  std::vector<std::uint8_t> decisions(n, 0);
  for (std::size_t k = 0; k < best_k; ++k) decisions[ranked.permutation[k]] = 1;
  SolveReport report = make_report(inst, BinaryAllocation(inst, std::move(decisions)));
  report.iterations = static_cast<std::int64_t>(best_k);
  return report;
}

SolveReport rc_greedy_skip_solve(const ProblemInstance& inst) {
  const RankedOrder ranked = rank_by_ratio(inst);
  const std::size_t n = inst.size();
  const auto floor_k = static_cast<std::size_t>(inst.coverage_floor);
  const double cap = inst.budget * (1.0 + kBudgetRelTol);

  std::vector<std::uint8_t> decisions(n, 0);
  double cost = 0.0;
  for (std::size_t k = 0; k < floor_k; ++k) {
    const std::size_t i = ranked.permutation[k];
    decisions[i] = 1;
    cost += inst.costs[i];
  }
  if (cost > cap) {
    throw Error(ErrorKind::kCoreInfeasible, "top-K units by ratio exceed the budget");
  }

  for (std::size_t k = floor_k; k < n; ++k) {
    const std::size_t i = ranked.permutation[k];
    if (ranked.scores[k] <= 0.0) break;  // ranking is sorted: nothing positive remains
    if (cost + inst.costs[i] <= cap) {
      decisions[i] = 1;
      cost += inst.costs[i];
    }
  }
  return make_report(inst, BinaryAllocation(inst, std::move(decisions)));
}

SolveReport rc_with_target_count(const ProblemInstance& inst, std::int64_t target) {
  if (target < 0 || target > static_cast<std::int64_t>(inst.size())) {
    throw Error(ErrorKind::kTargetOutOfRange, "target count must lie in [0, n]");
  }
  const RankedOrder ranked = rank_by_ratio(inst);
  std::vector<std::uint8_t> decisions(inst.size(), 0);
  for (std::int64_t k = 0; k < target; ++k) {
    decisions[ranked.permutation[static_cast<std::size_t>(k)]] = 1;
  }
  return make_report(inst, BinaryAllocation(inst, std::move(decisions)));
}

std::optional<double> ratio_threshold(const ProblemInstance& inst, const BinaryAllocation& alloc) {
  std::optional<double> lowest;
  for (std::size_t i = 0; i < alloc.size(); ++i) {
    if (!alloc.treated(i)) continue;
    const double r = inst.values[i] / inst.costs[i];
    if (!lowest || r < *lowest) lowest = r;
  }
  return lowest;
}

}  // namespace coverlock
