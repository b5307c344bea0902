#ifndef COVERLOCK_INSTANCE_HPP
#define COVERLOCK_INSTANCE_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "coverlock/errors.hpp"

namespace coverlock {

// Relative tolerance applied to budget-feasibility checks. Treated counts
// are integers and are always compared exactly.
inline constexpr double kBudgetRelTol = 1e-9;

// A finite selection problem: pick units to maximize total value subject to
// a spending cap and a minimum number of treated units.
struct ProblemInstance {
  std::vector<double> values;        // per-unit value, any sign
  std::vector<double> costs;         // per-unit cost, strictly positive
  double budget = 0.0;               // total spending cap, > 0
  std::int64_t coverage_floor = 0;   // minimum treated count, in [0, n]

  std::size_t size() const { return values.size(); }
};

// Shadow prices for the two global constraints: lambda prices the budget
// (value per cost unit), nu prices the coverage floor (value per treated
// unit). Both are nonnegative.
struct DualPrices {
  double lambda = 0.0;
  double nu = 0.0;
};

// A 0/1 treatment vector with its value/cost/count totals. Totals are
// computed once, in index order, by the constructor; every solver reports
// objectives through this one code path so equal allocations always carry
// bit-identical totals.
class BinaryAllocation {
 public:
  BinaryAllocation() = default;
  BinaryAllocation(const ProblemInstance& inst, std::vector<std::uint8_t> decisions);

  const std::vector<std::uint8_t>& decisions() const { return decisions_; }
  bool treated(std::size_t i) const { return decisions_[i] != 0; }
  std::size_t size() const { return decisions_.size(); }

  double value() const { return value_; }
  double cost() const { return cost_; }
  std::int64_t count() const { return count_; }

  friend bool operator==(const BinaryAllocation& a, const BinaryAllocation& b) {
    return a.decisions_ == b.decisions_;
  }

 private:
  std::vector<std::uint8_t> decisions_;
  double value_ = 0.0;
  double cost_ = 0.0;
  std::int64_t count_ = 0;
};

// A relaxed treatment vector with weights in [0,1]. Only the LP solver
// produces these; they never cross the CLI boundary.
class FractionalAllocation {
 public:
  FractionalAllocation() = default;
  FractionalAllocation(const ProblemInstance& inst, std::vector<double> weights);

  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return weights_.size(); }

  double value() const { return value_; }
  double cost() const { return cost_; }
  double mass() const { return mass_; }

 private:
  std::vector<double> weights_;
  double value_ = 0.0;
  double cost_ = 0.0;
  double mass_ = 0.0;
};

struct AllocationMetrics {
  double value = 0.0;
  double cost = 0.0;
  std::int64_t count = 0;
  bool feasible = false;
};

// Shared solver output. `objective` always equals `allocation.value()`.
struct SolveReport {
  BinaryAllocation allocation;
  double objective = 0.0;
  double budget_used = 0.0;
  std::int64_t coverage_used = 0;
  bool budget_binding = false;
  bool coverage_binding = false;
  bool feasible = false;
  bool optimal = true;         // false when a search budget was exhausted
  std::int64_t iterations = 0;
  int fractional_count = 0;
  std::optional<DualPrices> dual_prices;
};

// Checks every type invariant; throws Error on the first violation and
// returns the instance unchanged otherwise.
const ProblemInstance& validate_instance(const ProblemInstance& inst);

// Per-capita conversion used everywhere a (C, rho) pair enters: the floor is
// ceil(n * rho), guarded against float dust just above an integer.
std::int64_t coverage_floor_from_share(std::int64_t n, double share);

// Sum of the coverage_floor smallest costs; zero when the floor is zero.
double min_coverage_cost(const ProblemInstance& inst);

// True iff the cheapest way of meeting the coverage floor fits the budget,
// which is exactly when some feasible 0/1 allocation exists.
bool is_instance_feasible(const ProblemInstance& inst);

// Price-adjusted score v_i - lambda * w_i + nu.
double lagrangian_score(const ProblemInstance& inst, std::size_t i, const DualPrices& prices);

// The affine threshold rule: treat unit i iff its score is >= 0. Ties at
// exactly zero are treated. No feasibility guarantee.
BinaryAllocation threshold_policy(const ProblemInstance& inst, const DualPrices& prices);

AllocationMetrics allocation_metrics(const ProblemInstance& inst,
                                     std::span<const std::uint8_t> decisions);
AllocationMetrics allocation_metrics(const ProblemInstance& inst, const BinaryAllocation& alloc);

// Fills the binding flags and totals of a report from its allocation.
SolveReport make_report(const ProblemInstance& inst, BinaryAllocation alloc);

}  // namespace coverlock

#endif  // COVERLOCK_INSTANCE_HPP
