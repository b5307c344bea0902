#ifndef COVERLOCK_ANALYSIS_HPP
#define COVERLOCK_ANALYSIS_HPP

#include <optional>
#include <string>
#include <vector>

#include "coverlock/instance.hpp"

namespace coverlock {

// One unit scored against a set of shadow prices: cost-effectiveness ratio
// and the signed distance m = tau - lambda*cost + nu to the decision
// boundary.
struct ScoredUnit {
  double tau = 0.0;
  double cost = 0.0;
  double ratio = 0.0;
  double margin = 0.0;
};

std::vector<ScoredUnit> score_units(const ProblemInstance& inst, const DualPrices& prices);

// The price-implied ratio boundary lambda - nu / cost; rises with cost
// whenever nu > 0.
double lp_boundary(const DualPrices& prices, double cost);

// Cost at which the ratio boundary crosses a constant threshold t_star:
// nu / (lambda - t_star). No crossing in positive costs when lambda <= t_star.
std::optional<double> crossing_cost(const DualPrices& prices, double t_star);

// Fraction of coordinates on which two policies disagree.
double misallocation_area(const BinaryAllocation& a, const BinaryAllocation& b);

std::vector<std::size_t> disagreeing_indices(const BinaryAllocation& a,
                                             const BinaryAllocation& b);

struct MarginBandResult {
  double delta = 0.0;       // max_i |t_star - boundary(cost_i)|
  double cost_bound = 0.0;  // max_i cost_i
  bool contained = false;   // every disagreement has |margin| <= cost_bound * delta
};

// Checks that every disagreeing unit lies in the margin band of radius
// cost_bound * delta around the decision boundary.
MarginBandResult margin_band_check(const std::vector<ScoredUnit>& units, const DualPrices& prices,
                                   double t_star, const std::vector<std::size_t>& disagreeing);

struct WelfareLossResult {
  double loss = 0.0;   // (1/n) sum tau_i (pi*_i - pi_rc_i)
  double bound = 0.0;  // tau_bound * margin_constant * (1/n) sum c_i |t* - b(c_i)|
};

// Full comparison of two policies under one set of prices: disagreement
// area, band containment and the welfare loss with its bound.
struct MisallocationReport {
  double area = 0.0;
  std::vector<std::size_t> disagreeing;
  double delta = 0.0;        // max_i |t_star - boundary(cost_i)|
  double band_radius = 0.0;  // max_i cost_i * delta
  bool band_contained = false;
  double welfare_loss = 0.0;
  double loss_bound = 0.0;
};

MisallocationReport misallocation_report(const std::vector<ScoredUnit>& units,
                                         const DualPrices& prices,
                                         const BinaryAllocation& pi_star,
                                         const BinaryAllocation& pi_rc, double t_star,
                                         double margin_constant, double tau_bound);

// Reports the realized welfare loss between two policies next to the
// threshold-misspecification bound. The bound is informational: it holds
// only when the caller's margin constant is honest, so it is never asserted.
WelfareLossResult welfare_loss_and_bound(const std::vector<ScoredUnit>& units,
                                         const BinaryAllocation& pi_star,
                                         const BinaryAllocation& pi_rc, const DualPrices& prices,
                                         double t_star, double margin_constant, double tau_bound);

// Per-unit diagnostic table behind the boundary plots. Columns:
// index,tau,cost,ratio,margin,b_lp,pi_lp,pi_rc,disagree
std::string unit_table_csv(const std::vector<ScoredUnit>& units, const DualPrices& prices,
                           const BinaryAllocation& pi_lp, const BinaryAllocation& pi_rc);

}  // namespace coverlock

#endif  // COVERLOCK_ANALYSIS_HPP
