#include "coverlock/glc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <utility>

#include "coverlock/exact.hpp"

namespace coverlock {

namespace {

constexpr double kLambdaCap = 1152921504606846976.0;  // 2^60

}  // namespace

const char* glc_action_name(GlcAction action) {
  switch (action) {
    case GlcAction::kRaiseLower: return "raise-lambda-L";
    case GlcAction::kLowerUpper: return "lower-lambda-U";
    case GlcAction::kStop: return "augment-and-stop";
    case GlcAction::kContinue: return "continue";
  }
  return "unknown";
}

std::string GlcTrace::to_text() const {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof(line), "bracket lambda_U=%.12g doublings=%lld\n",
                lambda_upper_initial, static_cast<long long>(bracket_doublings));
  out += line;
  for (const GlcIteration& it : iterations) {
    std::snprintf(line, sizeof(line), "iter=%lld lambda=%.12g core=",
                  static_cast<long long>(it.iteration), it.lambda);
    out += line;
    for (std::size_t i = 0; i < it.core.size(); ++i) {
      if (i > 0) out += ',';
      out += std::to_string(it.core[i]);
    }
    std::snprintf(line, sizeof(line), " B=%.12g V=%.12g feasible=%d action=%s\n", it.cost,
                  it.value, it.core_feasible ? 1 : 0, glc_action_name(it.action));
    out += line;
  }
  return out;
}

GlcSelection glc_select_at_lambda(const ProblemInstance& inst, double lambda) {
  const std::size_t n = inst.size();
  const auto k = static_cast<std::size_t>(inst.coverage_floor);

  GlcSelection sel;
  sel.scores.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    sel.scores[i] = inst.values[i] - lambda * inst.costs[i];
  }

  sel.ranking.resize(n);
  std::iota(sel.ranking.begin(), sel.ranking.end(), std::size_t{0});
  std::sort(sel.ranking.begin(), sel.ranking.end(), [&](std::size_t a, std::size_t b) {
    if (sel.scores[a] != sel.scores[b]) return sel.scores[a] > sel.scores[b];
    if (inst.costs[a] != inst.costs[b]) return inst.costs[a] < inst.costs[b];
    return a < b;
  });

  std::vector<std::uint8_t> decisions(n, 0);
  sel.core.assign(sel.ranking.begin(), sel.ranking.begin() + k);
  for (const std::size_t i : sel.core) {
    decisions[i] = 1;
    sel.core_cost += inst.costs[i];
    sel.core_value += inst.values[i];
  }
  sel.cost = sel.core_cost;
  sel.value = sel.core_value;
  sel.core_feasible = sel.core_cost <= inst.budget * (1.0 + kBudgetRelTol);

  if (sel.core_feasible) {
    // Positive-score add-ons in rank order. A unit that breaks the budget is
    // skipped and the scan continues; only a nonpositive score stops it.
    const double cap = inst.budget * (1.0 + kBudgetRelTol);
    for (std::size_t pos = k; pos < n; ++pos) {
      const std::size_t j = sel.ranking[pos];
      if (sel.scores[j] <= 0.0) break;
      if (sel.cost + inst.costs[j] <= cap) {
        decisions[j] = 1;
        sel.cost += inst.costs[j];
        sel.value += inst.values[j];
        sel.added.push_back(j);
      }
    }
  }

  sel.allocation = BinaryAllocation(inst, std::move(decisions));
  return sel;
}

GlcResult glc_solve(const ProblemInstance& inst, const GlcConfig& config) {
  validate_instance(inst);
  if (config.tolerance <= 0.0 || config.tolerance >= 1.0) {
    throw Error(ErrorKind::kInvalidInput, "tolerance must lie in (0,1)");
  }
  if (config.max_iterations < 1) {
    throw Error(ErrorKind::kInvalidInput, "max_iterations must be >= 1");
  }
  if (!is_instance_feasible(inst)) {
    throw Error(ErrorKind::kInfeasible, "coverage floor cannot be met within the budget");
  }

  GlcResult result;
  const double slack_cap = config.tolerance * inst.budget;

  // Bracket growth: double lambda_U until its selection fits the budget.
  double lambda_low = 0.0;
  double lambda_high = 1.0;
  GlcSelection at_high = glc_select_at_lambda(inst, lambda_high);
  while (!at_high.core_feasible) {
    lambda_high *= 2.0;
    ++result.trace.bracket_doublings;
    if (lambda_high > kLambdaCap) {
      throw Error(ErrorKind::kNumericalFailure, "budget price bracket exceeded 2^60");
    }
    at_high = glc_select_at_lambda(inst, lambda_high);
  }
  result.trace.lambda_upper_initial = lambda_high;

  // The bracket endpoint is feasible, so a feasible fallback always exists.
  GlcSelection best = at_high;
  double best_lambda = lambda_high;
  std::int64_t iterations_used = 0;

  for (std::int64_t t = 1; t <= config.max_iterations; ++t) {
    const double lambda_mid = 0.5 * (lambda_low + lambda_high);
    GlcSelection sel = glc_select_at_lambda(inst, lambda_mid);
    iterations_used = t;

    GlcIteration record;
    record.iteration = t;
    record.lambda = lambda_mid;
    record.core = sel.core;
    record.cost = sel.cost;
    record.value = sel.value;
    record.core_feasible = sel.core_feasible;

    if (!sel.core_feasible) {
      lambda_low = lambda_mid;  // price too low: the forced core overspends
      record.action = GlcAction::kRaiseLower;
      result.trace.iterations.push_back(std::move(record));
      continue;
    }

    const double slack = inst.budget - sel.cost;
    const bool everyone_selected = sel.allocation.count() == static_cast<std::int64_t>(inst.size());
    if (slack <= slack_cap || everyone_selected) {
      // On the frontier, or no unit is left to admit: accept.
      best = std::move(sel);
      best_lambda = lambda_mid;
      record.action = GlcAction::kStop;
      result.trace.iterations.push_back(std::move(record));
      result.frontier_reached = true;
      break;
    }

    if (sel.value > best.value) {
      best = std::move(sel);
      best_lambda = lambda_mid;
    }
    lambda_high = lambda_mid;  // too much slack: lower the price
    record.action = GlcAction::kLowerUpper;
    result.trace.iterations.push_back(std::move(record));
  }

  result.lambda = best_lambda;
  result.report = make_report(inst, best.allocation);
  result.report.iterations = iterations_used;
  result.report.dual_prices = DualPrices{best_lambda, 0.0};
  return result;
}

double glc_regret(const ProblemInstance& inst, const GlcConfig& config) {
  const SolveReport exact = solve_exact(inst);
  const GlcResult glc = glc_solve(inst, config);
  return exact.objective - glc.report.objective;
}

}  // namespace coverlock
