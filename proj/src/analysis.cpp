#include "coverlock/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace coverlock {

std::vector<ScoredUnit> score_units(const ProblemInstance& inst, const DualPrices& prices) {
  std::vector<ScoredUnit> units(inst.size());
  for (std::size_t i = 0; i < inst.size(); ++i) {
    units[i].tau = inst.values[i];
    units[i].cost = inst.costs[i];
    units[i].ratio = inst.values[i] / inst.costs[i];
    units[i].margin = lagrangian_score(inst, i, prices);
  }
  return units;
}

double lp_boundary(const DualPrices& prices, double cost) {
  return prices.lambda - prices.nu / cost;
}

std::optional<double> crossing_cost(const DualPrices& prices, double t_star) {
  if (prices.lambda <= t_star) return std::nullopt;
  return prices.nu / (prices.lambda - t_star);
}

double misallocation_area(const BinaryAllocation& a, const BinaryAllocation& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::kLengthMismatch, "allocations differ in length");
  }
  std::size_t differ = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.treated(i) != b.treated(i)) ++differ;
  }
  return static_cast<double>(differ) / static_cast<double>(a.size());
}

std::vector<std::size_t> disagreeing_indices(const BinaryAllocation& a,
                                             const BinaryAllocation& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::kLengthMismatch, "allocations differ in length");
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.treated(i) != b.treated(i)) out.push_back(i);
  }
  return out;
}

MarginBandResult margin_band_check(const std::vector<ScoredUnit>& units, const DualPrices& prices,
                                   double t_star, const std::vector<std::size_t>& disagreeing) {
  MarginBandResult res;
  for (const ScoredUnit& u : units) {
    res.delta = std::max(res.delta, std::abs(t_star - lp_boundary(prices, u.cost)));
    res.cost_bound = std::max(res.cost_bound, u.cost);
  }
  res.contained = true;
  const double radius = res.cost_bound * res.delta + 1e-9;
  for (const std::size_t i : disagreeing) {
    if (std::abs(units[i].margin) > radius) {
      res.contained = false;
      break;
    }
  }
  return res;
}

WelfareLossResult welfare_loss_and_bound(const std::vector<ScoredUnit>& units,
                                         const BinaryAllocation& pi_star,
                                         const BinaryAllocation& pi_rc, const DualPrices& prices,
                                         double t_star, double margin_constant, double tau_bound) {
  if (pi_star.size() != units.size() || pi_rc.size() != units.size()) {
    throw Error(ErrorKind::kLengthMismatch, "policies differ in length from the unit list");
  }
  if (margin_constant <= 0.0) {
    throw Error(ErrorKind::kInvalidInput, "margin constant must be > 0");
  }
  double max_abs_tau = 0.0;
  for (const ScoredUnit& u : units) max_abs_tau = std::max(max_abs_tau, std::abs(u.tau));
  if (tau_bound < max_abs_tau) {
    throw Error(ErrorKind::kInvalidInput, "tau bound must dominate max |tau|");
  }

  WelfareLossResult res;
  const double n = static_cast<double>(units.size());
  double discrepancy = 0.0;
  for (std::size_t i = 0; i < units.size(); ++i) {
    const double diff = (pi_star.treated(i) ? 1.0 : 0.0) - (pi_rc.treated(i) ? 1.0 : 0.0);
    res.loss += units[i].tau * diff;
    discrepancy += units[i].cost * std::abs(t_star - lp_boundary(prices, units[i].cost));
  }
  res.loss /= n;
  res.bound = tau_bound * margin_constant * discrepancy / n;
  return res;
}

MisallocationReport misallocation_report(const std::vector<ScoredUnit>& units,
                                         const DualPrices& prices,
                                         const BinaryAllocation& pi_star,
                                         const BinaryAllocation& pi_rc, double t_star,
                                         double margin_constant, double tau_bound) {
  MisallocationReport report;
  report.area = misallocation_area(pi_star, pi_rc);
  report.disagreeing = disagreeing_indices(pi_star, pi_rc);
  const MarginBandResult band = margin_band_check(units, prices, t_star, report.disagreeing);
  report.delta = band.delta;
  report.band_radius = band.cost_bound * band.delta;
  report.band_contained = band.contained;
  const WelfareLossResult loss =
      welfare_loss_and_bound(units, pi_star, pi_rc, prices, t_star, margin_constant, tau_bound);
  report.welfare_loss = loss.loss;
  report.loss_bound = loss.bound;
  return report;
}

std::string unit_table_csv(const std::vector<ScoredUnit>& units, const DualPrices& prices,
                           const BinaryAllocation& pi_lp, const BinaryAllocation& pi_rc) {
  if (pi_lp.size() != units.size() || pi_rc.size() != units.size()) {
    throw Error(ErrorKind::kLengthMismatch, "policies differ in length from the unit list");
  }
  std::string out = "index,tau,cost,ratio,margin,b_lp,pi_lp,pi_rc,disagree\n";
  char line[256];
  for (std::size_t i = 0; i < units.size(); ++i) {
    const ScoredUnit& u = units[i];
    const int lp = pi_lp.treated(i) ? 1 : 0;
    const int rc = pi_rc.treated(i) ? 1 : 0;
    std::snprintf(line, sizeof(line), "%zu,%.10g,%.10g,%.10g,%.10g,%.10g,%d,%d,%d\n", i, u.tau,
                  u.cost, u.ratio, u.margin, lp_boundary(prices, u.cost), lp, rc,
                  lp != rc ? 1 : 0);
    out += line;
  }
  return out;
}

}  // namespace coverlock
