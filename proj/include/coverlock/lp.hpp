#ifndef COVERLOCK_LP_HPP
#define COVERLOCK_LP_HPP

#include <vector>

#include "coverlock/instance.hpp"

namespace coverlock {

// Weights within (eps, 1-eps) of this band are classified as fractional.
inline constexpr double kFractionalBand = 1e-9;

// Optimal extreme point of the relaxation together with the shadow prices
// recovered from its support. At most two coordinates are fractional.
struct LpSolution {
  FractionalAllocation allocation;
  double objective = 0.0;
  DualPrices prices;
  std::vector<std::size_t> fractional_indices;
  std::int64_t iterations = 0;   // price-bisection steps (phase B only)
  bool coverage_pinned = false;  // true when phase B ran (floor active)
  bool converged = true;         // false if bisection hit its iteration cap
};

// Solves the relaxation max v.z s.t. w.z <= W, sum z >= K, z in [0,1]^n.
//
// Phase A ignores the floor and runs the fractional-knapsack greedy over
// positive-ratio units; if the resulting mass already meets the floor the
// solution is returned with nu = 0. Otherwise phase B pins the mass to
// exactly K and bisects the budget price, splitting the boundary group
// fractionally so the budget is met exactly.
LpSolution solve_lp(const ProblemInstance& inst);

// Reference optimum found by enumerating the bound patterns of extreme
// points (at most two coordinates off their bounds) and solving the
// residual 1- or 2-variable system. Test oracle; requires n <= 10.
LpSolution enumerate_extreme_points_oracle(const ProblemInstance& inst);

// solve_lp objective minus the exact 0/1 optimum; lies in [0, 2*max|v|].
double integrality_gap(const ProblemInstance& inst);

// Rounds the at-most-two fractional coordinates down, then restores the
// coverage floor by rounding back up (or admitting the cheapest excluded
// unit) while keeping the budget feasible.
BinaryAllocation round_lp_to_feasible(const LpSolution& sol, const ProblemInstance& inst);

}  // namespace coverlock

#endif  // COVERLOCK_LP_HPP
