#include "coverlock/instance.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace coverlock {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kNonPositiveCost: return "NonPositiveCost";
    case ErrorKind::kNonPositiveBudget: return "NonPositiveBudget";
    case ErrorKind::kCoverageOutOfRange: return "CoverageOutOfRange";
    case ErrorKind::kLengthMismatch: return "LengthMismatch";
    case ErrorKind::kNonFiniteEntry: return "NonFiniteEntry";
    case ErrorKind::kInfeasible: return "Infeasible";
    case ErrorKind::kTooLarge: return "TooLarge";
    case ErrorKind::kNoFeasibleCutoff: return "NoFeasibleCutoff";
    case ErrorKind::kCoreInfeasible: return "CoreInfeasible";
    case ErrorKind::kTargetOutOfRange: return "TargetOutOfRange";
    case ErrorKind::kRoundingInfeasible: return "RoundingInfeasible";
    case ErrorKind::kNumericalFailure: return "NumericalFailure";
    case ErrorKind::kTooManyInfeasibleDraws: return "TooManyInfeasibleDraws";
    case ErrorKind::kInvalidInput: return "InvalidInput";
  }
  return "UnknownError";
}

namespace {

struct Totals {
  double value = 0.0;
  double cost = 0.0;
  std::int64_t count = 0;
};

Totals sum_decisions(const ProblemInstance& inst, std::span<const std::uint8_t> decisions) {
  Totals t;
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    if (decisions[i] != 0) {
      t.value += inst.values[i];
      t.cost += inst.costs[i];
      ++t.count;
    }
  }
  return t;
}

}  // namespace

BinaryAllocation::BinaryAllocation(const ProblemInstance& inst,
                                   std::vector<std::uint8_t> decisions)
    : decisions_(std::move(decisions)) {
  if (decisions_.size() != inst.size()) {
    throw Error(ErrorKind::kLengthMismatch, "allocation length differs from instance size");
  }
  const Totals t = sum_decisions(inst, decisions_);
  value_ = t.value;
  cost_ = t.cost;
  count_ = t.count;
}

FractionalAllocation::FractionalAllocation(const ProblemInstance& inst,
                                           std::vector<double> weights)
    : weights_(std::move(weights)) {
  if (weights_.size() != inst.size()) {
    throw Error(ErrorKind::kLengthMismatch, "allocation length differs from instance size");
  }
  for (const double z : weights_) {
    if (z < -1e-9 || z > 1.0 + 1e-9) {
      throw Error(ErrorKind::kInvalidInput, "fractional weight outside [0,1]");
    }
  }
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    value_ += inst.values[i] * weights_[i];
    cost_ += inst.costs[i] * weights_[i];
    mass_ += weights_[i];
  }
}

const ProblemInstance& validate_instance(const ProblemInstance& inst) {
  if (inst.values.size() != inst.costs.size()) {
    throw Error(ErrorKind::kLengthMismatch, "values and costs differ in length");
  }
  if (inst.values.empty()) {
    throw Error(ErrorKind::kLengthMismatch, "instance must contain at least one unit");
  }
  for (const double v : inst.values) {
    if (!std::isfinite(v)) throw Error(ErrorKind::kNonFiniteEntry, "non-finite value");
  }
  for (const double w : inst.costs) {
    if (!std::isfinite(w)) throw Error(ErrorKind::kNonFiniteEntry, "non-finite cost");
    if (w <= 0.0) throw Error(ErrorKind::kNonPositiveCost, "every cost must be > 0");
  }
  if (!std::isfinite(inst.budget)) {
    throw Error(ErrorKind::kNonFiniteEntry, "non-finite budget");
  }
  if (inst.budget <= 0.0) {
    throw Error(ErrorKind::kNonPositiveBudget, "budget must be > 0");
  }
  if (inst.coverage_floor < 0 ||
      inst.coverage_floor > static_cast<std::int64_t>(inst.size())) {
    throw Error(ErrorKind::kCoverageOutOfRange, "coverage floor must lie in [0, n]");
  }
  return inst;
}

std::int64_t coverage_floor_from_share(std::int64_t n, double share) {
  return static_cast<std::int64_t>(std::ceil(static_cast<double>(n) * share - 1e-9));
}

double min_coverage_cost(const ProblemInstance& inst) {
  const auto k = static_cast<std::size_t>(inst.coverage_floor);
  if (k == 0) return 0.0;
  std::vector<double> sorted(inst.costs);
  std::nth_element(sorted.begin(), sorted.begin() + (k - 1), sorted.end());
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) total += sorted[i];
  return total;
}

bool is_instance_feasible(const ProblemInstance& inst) {
  return min_coverage_cost(inst) <= inst.budget;
}

double lagrangian_score(const ProblemInstance& inst, std::size_t i, const DualPrices& prices) {
  return inst.values[i] - prices.lambda * inst.costs[i] + prices.nu;
}

BinaryAllocation threshold_policy(const ProblemInstance& inst, const DualPrices& prices) {
  std::vector<std::uint8_t> decisions(inst.size(), 0);
  for (std::size_t i = 0; i < inst.size(); ++i) {
    decisions[i] = lagrangian_score(inst, i, prices) >= 0.0 ? 1 : 0;
  }
  return BinaryAllocation(inst, std::move(decisions));
}

AllocationMetrics allocation_metrics(const ProblemInstance& inst,
                                     std::span<const std::uint8_t> decisions) {
  if (decisions.size() != inst.size()) {
    throw Error(ErrorKind::kLengthMismatch, "allocation length differs from instance size");
  }
  const Totals t = sum_decisions(inst, decisions);
  AllocationMetrics m;
  m.value = t.value;
  m.cost = t.cost;
  m.count = t.count;
  m.feasible = t.cost <= inst.budget * (1.0 + kBudgetRelTol) && t.count >= inst.coverage_floor;
  return m;
}

AllocationMetrics allocation_metrics(const ProblemInstance& inst, const BinaryAllocation& alloc) {
  return allocation_metrics(inst, std::span<const std::uint8_t>(alloc.decisions()));
}

SolveReport make_report(const ProblemInstance& inst, BinaryAllocation alloc) {
  SolveReport report;
  report.objective = alloc.value();
  report.budget_used = alloc.cost();
  report.coverage_used = alloc.count();
  report.budget_binding = std::abs(inst.budget - alloc.cost()) <= kBudgetRelTol * inst.budget;
  report.coverage_binding = alloc.count() == inst.coverage_floor;
  report.feasible = alloc.cost() <= inst.budget * (1.0 + kBudgetRelTol) &&
                    alloc.count() >= inst.coverage_floor;
  report.allocation = std::move(alloc);
  return report;
}

}  // namespace coverlock
