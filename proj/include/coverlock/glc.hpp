#ifndef COVERLOCK_GLC_HPP
#define COVERLOCK_GLC_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "coverlock/instance.hpp"

namespace coverlock {

struct GlcConfig {
  double tolerance = 0.05;        // accepted relative budget slack
  std::int64_t max_iterations = 100;
  // Score ties rank the cheaper unit first, then the lower index. Kept as a
  // named constant so the report can state the rule it ran under.
  static constexpr const char* kTieBreak = "cheaper-then-lower-index";
};

// One ranked pass at a fixed budget price: forced coverage core, then greedy
// augmentation over positive scores, skipping units that break the budget.
struct GlcSelection {
  BinaryAllocation allocation;
  std::vector<double> scores;        // by unit index, v_i - lambda * w_i
  std::vector<std::size_t> ranking;  // unit indices in score order
  std::vector<std::size_t> core;     // forced top-K, in score order
  double core_cost = 0.0;
  double core_value = 0.0;
  bool core_feasible = false;
  std::vector<std::size_t> added;    // augmentation admissions, in scan order
  double cost = 0.0;
  double value = 0.0;
};

enum class GlcAction { kRaiseLower, kLowerUpper, kStop, kContinue };

const char* glc_action_name(GlcAction action);

struct GlcIteration {
  std::int64_t iteration = 0;
  double lambda = 0.0;
  std::vector<std::size_t> core;
  double cost = 0.0;
  double value = 0.0;
  bool core_feasible = false;
  GlcAction action = GlcAction::kContinue;
};

struct GlcTrace {
  double lambda_upper_initial = 0.0;  // bracket endpoint after geometric growth
  std::int64_t bracket_doublings = 0;
  std::vector<GlcIteration> iterations;

  // One line per iteration, stable field order; used by golden-file tests.
  std::string to_text() const;
};

GlcSelection glc_select_at_lambda(const ProblemInstance& inst, double lambda);

struct GlcResult {
  SolveReport report;
  GlcTrace trace;
  bool frontier_reached = false;  // false: best feasible iterate returned
  double lambda = 0.0;            // price of the returned selection
};

// Algorithm: check feasibility, grow the price bracket geometrically until
// the selection fits the budget, then bisect to the budget frontier. Returns
// the best feasible iterate if the frontier tolerance is never met.
GlcResult glc_solve(const ProblemInstance& inst, const GlcConfig& config = {});

// Exact optimum minus the GLC objective; nonnegative.
double glc_regret(const ProblemInstance& inst, const GlcConfig& config = {});

}  // namespace coverlock

#endif  // COVERLOCK_GLC_HPP
