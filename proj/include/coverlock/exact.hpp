#ifndef COVERLOCK_EXACT_HPP
#define COVERLOCK_EXACT_HPP

#include <cstdint>
#include <vector>

#include "coverlock/instance.hpp"

namespace coverlock {

// Snapshot of a pruned search node, kept only when a PruneLog is attached.
// `fixed` holds the decided prefix (by original index), `is_free` marks the
// units the subtree was still allowed to choose.
struct PrunedNode {
  std::vector<std::uint8_t> fixed;
  std::vector<std::uint8_t> is_free;
  double upper_bound = 0.0;
  double incumbent = 0.0;
};

using PruneLog = std::vector<PrunedNode>;

struct ExactOptions {
  // Exploring more nodes than this degrades the solve to best-found with
  // optimal = false instead of failing.
  std::int64_t node_budget = 10'000'000;
  PruneLog* prune_log = nullptr;
};

// Exact 0/1 optimum via branch and bound over units in ratio order, bounded
// by the value of the residual relaxation. Among equal-value optima the
// lexicographically smallest decision vector (original order) is returned.
SolveReport solve_exact(const ProblemInstance& inst, const ExactOptions& options = {});

// Ground-truth oracle: full enumeration of all 2^n subsets, n <= 25. Same
// contract and tie-break as solve_exact.
SolveReport solve_exhaustive(const ProblemInstance& inst);

}  // namespace coverlock

#endif  // COVERLOCK_EXACT_HPP
