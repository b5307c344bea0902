#include "coverlock/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include "coverlock/detail/order.hpp"
#include "coverlock/exact.hpp"

namespace coverlock {

namespace {

constexpr int kMaxBisectionIterations = 200;
constexpr double kLambdaCap = 1152921504606846976.0;  // 2^60

std::vector<std::size_t> find_fractional(const std::vector<double>& z) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i] > kFractionalBand && z[i] < 1.0 - kFractionalBand) out.push_back(i);
  }
  return out;
}

LpSolution finish(const ProblemInstance& inst, std::vector<double> z, DualPrices prices,
                  std::int64_t iterations, bool pinned, bool converged) {
  LpSolution sol;
  sol.fractional_indices = find_fractional(z);
  sol.allocation = FractionalAllocation(inst, std::move(z));
  sol.objective = sol.allocation.value();
  prices.lambda = std::max(0.0, prices.lambda);
  prices.nu = std::max(0.0, prices.nu);
  sol.prices = prices;
  sol.iterations = iterations;
  sol.coverage_pinned = pinned;
  sol.converged = converged;
  return sol;
}

// Fractional-knapsack greedy ignoring the coverage floor: fill positive-ratio
// units in ratio order until the budget binds, with at most one split unit.
struct PhaseAResult {
  std::vector<double> z;
  double mass = 0.0;
  double lambda = 0.0;
};

PhaseAResult phase_a(const ProblemInstance& inst) {
  const std::size_t n = inst.size();
  const auto order = detail::ratio_descending_order(inst.values, inst.costs);

  PhaseAResult res;
  res.z.assign(n, 0.0);
  double remaining = inst.budget;
  bool lambda_set = false;
  for (const std::size_t i : order) {
    if (inst.values[i] <= 0.0) break;  // ratio order: all later ratios are <= 0 too
    if (inst.costs[i] <= remaining) {
      res.z[i] = 1.0;
      remaining -= inst.costs[i];
      res.mass += 1.0;
    } else {
      // first positive-ratio unit that does not fully fit prices the budget
      res.lambda = inst.values[i] / inst.costs[i];
      lambda_set = true;
      const double frac = remaining / inst.costs[i];
      if (frac > 0.0) {
        res.z[i] = frac;
        res.mass += frac;
      }
      remaining = 0.0;
      break;
    }
  }
  if (!lambda_set) res.lambda = 0.0;  // budget slack over all positive units
  return res;
}

// Top-k selection under score v - lambda*w descending, ties toward the
// cheaper unit then the lower index (the budget-friendly orientation).
struct PinnedSelection {
  std::vector<std::size_t> chosen;  // exactly k indices
  double cost = 0.0;
};

PinnedSelection select_pinned(const ProblemInstance& inst, double lambda, std::size_t k,
                              std::vector<std::size_t>& scratch) {
  scratch.resize(inst.size());
  std::iota(scratch.begin(), scratch.end(), std::size_t{0});
  const auto better = [&](std::size_t a, std::size_t b) {
    const double sa = inst.values[a] - lambda * inst.costs[a];
    const double sb = inst.values[b] - lambda * inst.costs[b];
    if (sa != sb) return sa > sb;
    if (inst.costs[a] != inst.costs[b]) return inst.costs[a] < inst.costs[b];
    return a < b;
  };
  if (k < scratch.size()) {
    std::nth_element(scratch.begin(), scratch.begin() + k, scratch.end(), better);
  }
  PinnedSelection sel;
  sel.chosen.assign(scratch.begin(), scratch.begin() + k);
  for (const std::size_t i : sel.chosen) sel.cost += inst.costs[i];
  return sel;
}

double min_selected_score(const ProblemInstance& inst, double lambda,
                          const std::vector<std::size_t>& chosen) {
  double lowest = std::numeric_limits<double>::infinity();
  for (const std::size_t i : chosen) {
    lowest = std::min(lowest, inst.values[i] - lambda * inst.costs[i]);
  }
  return lowest;
}

// Coverage floor binds: pin the mass to exactly K, bisect the budget price
// to the selection crossing, then split the swap group so the budget is met
// exactly. The result is a vertex of the pinned polytope, hence has at most
// two fractional coordinates.
LpSolution phase_b(const ProblemInstance& inst) {
  const std::size_t n = inst.size();
  const auto k = static_cast<std::size_t>(inst.coverage_floor);
  std::vector<std::size_t> scratch;

  PinnedSelection at_zero = select_pinned(inst, 0.0, k, scratch);
  if (at_zero.cost <= inst.budget * (1.0 + kBudgetRelTol)) {
    std::vector<double> z(n, 0.0);
    for (const std::size_t i : at_zero.chosen) z[i] = 1.0;
    const double nu = -min_selected_score(inst, 0.0, at_zero.chosen);
    return finish(inst, std::move(z), {0.0, std::max(0.0, nu)}, 0, true, true);
  }

  // Bracket the crossing: cost is non-increasing in lambda.
  double lambda_lo = 0.0;
  double lambda_hi = 1.0;
  PinnedSelection sel_hi = select_pinned(inst, lambda_hi, k, scratch);
  while (sel_hi.cost > inst.budget) {
    lambda_hi *= 2.0;
    if (lambda_hi > kLambdaCap) {
      throw Error(ErrorKind::kNumericalFailure, "budget price bracket exceeded 2^60");
    }
    sel_hi = select_pinned(inst, lambda_hi, k, scratch);
  }

  std::int64_t iterations = 0;
  bool converged = false;
  PinnedSelection sel_lo = select_pinned(inst, lambda_lo, k, scratch);
  while (iterations < kMaxBisectionIterations) {
    const double mid = 0.5 * (lambda_lo + lambda_hi);
    if (mid <= lambda_lo || mid >= lambda_hi) {
      converged = true;  // bracket is machine-precision tight
      break;
    }
    ++iterations;
    PinnedSelection sel_mid = select_pinned(inst, mid, k, scratch);
    if (sel_mid.cost > inst.budget) {
      lambda_lo = mid;
      sel_lo = std::move(sel_mid);
    } else {
      lambda_hi = mid;
      sel_hi = std::move(sel_mid);
    }
  }

  // Decompose: F = units on both sides of the crossing (kept whole),
  // G = the swap group, inside which mass m_need and cost b_need remain.
  std::vector<std::uint8_t> in_lo(n, 0), in_hi(n, 0);
  for (const std::size_t i : sel_lo.chosen) in_lo[i] = 1;
  for (const std::size_t i : sel_hi.chosen) in_hi[i] = 1;

  std::vector<double> z(n, 0.0);
  double cost_fixed = 0.0;
  std::size_t fixed_count = 0;
  std::vector<std::size_t> group;
  for (std::size_t i = 0; i < n; ++i) {
    if (in_lo[i] && in_hi[i]) {
      z[i] = 1.0;
      cost_fixed += inst.costs[i];
      ++fixed_count;
    } else if (in_lo[i] || in_hi[i]) {
      group.push_back(i);
    }
  }

  const std::size_t m_need = k - fixed_count;
  const double b_need = inst.budget - cost_fixed;

  double lambda_star = lambda_hi;
  double nu_star = 0.0;

  if (group.empty() || m_need == 0) {
    // No crossing inside the bracket; fall back to the feasible endpoint.
    std::fill(z.begin(), z.end(), 0.0);
    for (const std::size_t i : sel_hi.chosen) z[i] = 1.0;
    nu_star = std::max(0.0, -min_selected_score(inst, lambda_hi, sel_hi.chosen));
    return finish(inst, std::move(z), {lambda_hi, nu_star}, iterations, true, converged);
  }

  std::sort(group.begin(), group.end(), [&](std::size_t a, std::size_t b) {
    if (inst.costs[a] != inst.costs[b]) return inst.costs[a] < inst.costs[b];
    return a < b;
  });

  for (std::size_t j = 0; j < m_need; ++j) z[group[j]] = 1.0;
  double cost_now = 0.0;
  for (std::size_t j = 0; j < m_need; ++j) cost_now += inst.costs[group[j]];

  std::size_t frac_out = n, frac_in = n;
  for (std::size_t step = 0; step < m_need; ++step) {
    const std::size_t out = step;                    // cheapest still-taken unit
    const std::size_t in = group.size() - 1 - step;  // dearest still-untaken unit
    if (in < m_need) break;  // swap group exhausted
    const double delta = inst.costs[group[in]] - inst.costs[group[out]];
    if (delta <= 0.0) break;  // equal costs: no further budget can be used
    if (cost_now + delta <= b_need) {
      z[group[out]] = 0.0;
      z[group[in]] = 1.0;
      cost_now += delta;
      if (cost_now == b_need) break;
    } else {
      const double theta = (b_need - cost_now) / delta;
      if (theta > 0.0) {
        z[group[out]] = 1.0 - theta;
        z[group[in]] = theta;
        frac_out = group[out];
        frac_in = group[in];
      }
      break;
    }
  }

  if (frac_out < n) {
    // Both split units sit on the decision boundary: their score crossing
    // recovers the budget price exactly, and the boundary score gives nu.
    const double dw = inst.costs[frac_in] - inst.costs[frac_out];
    if (dw != 0.0) {
      lambda_star = (inst.values[frac_in] - inst.values[frac_out]) / dw;
    }
    nu_star = -(inst.values[frac_out] - lambda_star * inst.costs[frac_out]);
  } else {
    std::vector<std::size_t> chosen;
    for (std::size_t i = 0; i < n; ++i) {
      if (z[i] > 0.5) chosen.push_back(i);
    }
    nu_star = -min_selected_score(inst, lambda_star, chosen);
  }

  return finish(inst, std::move(z), {lambda_star, std::max(0.0, nu_star)}, iterations, true,
                converged);
}

}  // namespace

LpSolution solve_lp(const ProblemInstance& inst) {
  validate_instance(inst);
  if (!is_instance_feasible(inst)) {
    throw Error(ErrorKind::kInfeasible, "coverage floor cannot be met within the budget");
  }

  PhaseAResult a = phase_a(inst);
  if (a.mass >= static_cast<double>(inst.coverage_floor) - 1e-9) {
    return finish(inst, std::move(a.z), {a.lambda, 0.0}, 0, false, true);
  }
  return phase_b(inst);
}

LpSolution enumerate_extreme_points_oracle(const ProblemInstance& inst) {
  validate_instance(inst);
  const std::size_t n = inst.size();
  if (n > 10) {
    throw Error(ErrorKind::kTooLarge, "extreme-point enumeration supports n <= 10");
  }
  if (!is_instance_feasible(inst)) {
    throw Error(ErrorKind::kInfeasible, "coverage floor cannot be met within the budget");
  }

  const double budget_fuzz = 1e-12 * std::max(1.0, inst.budget);
  const double floor_needed = static_cast<double>(inst.coverage_floor);
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> best_z;

  const auto consider = [&](const std::vector<double>& z) {
    double value = 0.0, cost = 0.0, mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      value += inst.values[i] * z[i];
      cost += inst.costs[i] * z[i];
      mass += z[i];
    }
    if (cost > inst.budget + budget_fuzz) return;
    if (mass < floor_needed - 1e-12) return;
    if (value > best) {
      best = value;
      best_z = z;
    }
  };

  std::vector<double> z(n, 0.0);
  const auto fill_from_mask = [&](std::uint32_t mask, const std::vector<std::size_t>& positions) {
    for (std::size_t b = 0; b < positions.size(); ++b) {
      z[positions[b]] = (mask >> b) & 1u ? 1.0 : 0.0;
    }
  };

  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});

  // All-binary corners.
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    fill_from_mask(mask, all);
    consider(z);
  }

  // One coordinate off its bound: a single tight global constraint pins it.
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < n; ++i) {
      if (i != j) rest.push_back(i);
    }
    for (std::uint32_t mask = 0; mask < (1u << rest.size()); ++mask) {
      fill_from_mask(mask, rest);
      z[j] = 0.0;
      double cost_fixed = 0.0, mass_fixed = 0.0;
      for (const std::size_t i : rest) {
        cost_fixed += inst.costs[i] * z[i];
        mass_fixed += z[i];
      }
      const double budget_pin = (inst.budget - cost_fixed) / inst.costs[j];
      const double floor_pin = floor_needed - mass_fixed;
      for (const double candidate : {budget_pin, floor_pin}) {
        if (candidate >= 0.0 && candidate <= 1.0) {
          z[j] = candidate;
          consider(z);
        }
      }
      z[j] = 0.0;
    }
  }

  // Two coordinates off their bounds: both global constraints are tight.
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t l = j + 1; l < n; ++l) {
      if (inst.costs[j] == inst.costs[l]) continue;  // singular system
      std::vector<std::size_t> rest;
      for (std::size_t i = 0; i < n; ++i) {
        if (i != j && i != l) rest.push_back(i);
      }
      for (std::uint32_t mask = 0; mask < (1u << rest.size()); ++mask) {
        fill_from_mask(mask, rest);
        z[j] = z[l] = 0.0;
        double cost_fixed = 0.0, mass_fixed = 0.0;
        for (const std::size_t i : rest) {
          cost_fixed += inst.costs[i] * z[i];
          mass_fixed += z[i];
        }
        const double budget_left = inst.budget - cost_fixed;
        const double mass_left = floor_needed - mass_fixed;
        const double zj = (budget_left - inst.costs[l] * mass_left) /
                          (inst.costs[j] - inst.costs[l]);
        const double zl = mass_left - zj;
        if (zj >= 0.0 && zj <= 1.0 && zl >= 0.0 && zl <= 1.0) {
          z[j] = zj;
          z[l] = zl;
          consider(z);
        }
        z[j] = z[l] = 0.0;
      }
    }
  }

  LpSolution sol;
  sol.fractional_indices = find_fractional(best_z);
  sol.allocation = FractionalAllocation(inst, std::move(best_z));
  sol.objective = sol.allocation.value();
  return sol;
}

double integrality_gap(const ProblemInstance& inst) {
  return solve_lp(inst).objective - solve_exact(inst).objective;
}

BinaryAllocation round_lp_to_feasible(const LpSolution& sol, const ProblemInstance& inst) {
  const std::vector<double>& z = sol.allocation.weights();
  if (z.size() != inst.size()) {
    throw Error(ErrorKind::kLengthMismatch, "solution length differs from instance size");
  }
  const std::size_t n = inst.size();
  std::vector<std::uint8_t> decisions(n, 0);
  double cost = 0.0;
  std::int64_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (z[i] >= 1.0 - kFractionalBand) {
      decisions[i] = 1;
      cost += inst.costs[i];
      ++count;
    }
  }

  if (count < inst.coverage_floor) {
    // Round fractional units back up first, then fall back to the cheapest
    // excluded units, keeping the budget feasible throughout.
    std::vector<std::size_t> candidates;
    for (const std::size_t i : sol.fractional_indices) {
      if (!decisions[i]) candidates.push_back(i);
    }
    std::sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
      if (inst.costs[a] != inst.costs[b]) return inst.costs[a] < inst.costs[b];
      return a < b;
    });
    std::vector<std::size_t> excluded;
    for (std::size_t i = 0; i < n; ++i) {
      if (!decisions[i] && z[i] <= kFractionalBand) excluded.push_back(i);
    }
    std::sort(excluded.begin(), excluded.end(), [&](std::size_t a, std::size_t b) {
      if (inst.costs[a] != inst.costs[b]) return inst.costs[a] < inst.costs[b];
      return a < b;
    });
    candidates.insert(candidates.end(), excluded.begin(), excluded.end());

    const double cap = inst.budget * (1.0 + kBudgetRelTol);
    for (const std::size_t i : candidates) {
      if (count >= inst.coverage_floor) break;
      if (cost + inst.costs[i] <= cap) {
        decisions[i] = 1;
        cost += inst.costs[i];
        ++count;
      }
    }
    if (count < inst.coverage_floor) {
      throw Error(ErrorKind::kRoundingInfeasible,
                  "cannot restore the coverage floor within the budget");
    }
  }
  return BinaryAllocation(inst, std::move(decisions));
}

}  // namespace coverlock
