#ifndef COVERLOCK_RC_HPP
#define COVERLOCK_RC_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "coverlock/instance.hpp"

namespace coverlock {

// Units in cost-effectiveness order with cumulative prefix totals.
struct RankedOrder {
  std::vector<std::size_t> permutation;   // unit indices, ratio descending
  std::vector<double> scores;             // ratio along the permutation
  std::vector<double> cumulative_value;   // T_k for prefix length k = 1..n
  std::vector<double> cumulative_cost;    // C_k for prefix length k = 1..n
};

// Descending sort by v_i / w_i; ties rank the higher value first, then the
// lower index.
RankedOrder rank_by_ratio(const ProblemInstance& inst);

// Prefix-cut rule: treat exactly the best feasible prefix of the ranking.
// Fails with NoFeasibleCutoff when no prefix meets both constraints, which
// can happen on feasible instances when an expensive unit ranks early.
SolveReport rc_prefix_solve(const ProblemInstance& inst);

// Skip variant: force the top-K core, then walk the rest of the ranking
// adding any positive-ratio unit that fits the budget (skip, don't stop).
// Dominates the prefix rule whenever both succeed.
SolveReport rc_greedy_skip_solve(const ProblemInstance& inst);

// Calibration mode: treat exactly the top `target` units by ratio, ignoring
// the budget; violations surface through the report's feasibility flags.
SolveReport rc_with_target_count(const ProblemInstance& inst, std::int64_t target);

// The constant threshold implied by an allocation: the lowest ratio among
// treated units. Empty allocations have no threshold.
std::optional<double> ratio_threshold(const ProblemInstance& inst, const BinaryAllocation& alloc);

}  // namespace coverlock

#endif  // COVERLOCK_RC_HPP
