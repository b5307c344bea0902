#include "coverlock/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "coverlock/detail/order.hpp"
#include "coverlock/glc.hpp"
#include "coverlock/lp.hpp"

namespace coverlock {

namespace {

// Decision vectors compare by original index, 0 before 1.
bool lex_smaller(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

// Branch and bound over the units left free by reduced-cost fixing.
// Tie-break contract: among equal-value optima, the lexicographically
// smallest decision vector wins, so pruning is strict (bound below the
// incumbent minus a tolerance) and fixing uses the same strict margin.
//
// The search restarts in passes: each pass fixes against the best value
// found so far, which shrinks the free set toward the units inside the true
// integrality gap, then spends a slice of the node budget. A pass that
// completes certifies optimality.
class BranchAndBound {
 public:
  BranchAndBound(const ProblemInstance& inst, const ExactOptions& options)
      : inst_(inst), options_(options), n_(inst.size()) {
    budget_cap_ = inst.budget * (1.0 + kBudgetRelTol);
    prepare_root();
  }

  SolveReport run() {
    std::vector<std::uint8_t> incumbent_decisions = seed_decisions_;
    double incumbent_value = seed_value_;
    std::int64_t budget_remaining = options_.node_budget;
    std::int64_t nodes_total = 0;
    bool proven = false;

    // Restart ladder: every pass re-fixes against the best value so far, so
    // an improved incumbent shrinks the free set before more nodes are
    // spent. Chunks escalate only when a pass brings no improvement.
    std::int64_t chunk = 100'000;
    while (budget_remaining > 0) {
      build_reduction(incumbent_value);
      floor_seed_ = incumbent_value;
      node_budget_ = std::min(budget_remaining, chunk);
      nodes_ = 0;
      node_budget_hit_ = false;
      decisions_ = fixed_decisions_;
      best_decisions_.clear();
      best_value_ = -std::numeric_limits<double>::infinity();

      explore(0, inst_.budget - fixed_cost_, fixed_value_,
              std::max<std::int64_t>(0, inst_.coverage_floor - fixed_count_), 0);
      nodes_total += nodes_;
      budget_remaining -= nodes_;

      bool improved = false;
      if (!best_decisions_.empty() &&
          (best_value_ > incumbent_value ||
           (best_value_ == incumbent_value && lex_smaller(best_decisions_, incumbent_decisions)))) {
        improved = best_value_ > incumbent_value;
        incumbent_value = best_value_;
        incumbent_decisions = best_decisions_;
      }
      if (!node_budget_hit_) {
        proven = true;
        break;
      }
      if (!improved) chunk = std::min<std::int64_t>(chunk * 4, 4'000'000);
    }

    SolveReport report = make_report(inst_, BinaryAllocation(inst_, incumbent_decisions));
    report.optimal = proven;
    report.iterations = nodes_total;
    report.dual_prices = root_prices_;
    return report;
  }

 private:
  // Root preparation: certified dual bound and a feasible seed (rounded
  // relaxation topped up with affordable positives) for the value floor.
  void prepare_root() {
    const LpSolution lp = solve_lp(inst_);
    root_prices_ = lp.prices;
    root_dual_ = lp.prices.lambda * inst_.budget -
                 lp.prices.nu * static_cast<double>(inst_.coverage_floor);
    for (std::size_t i = 0; i < n_; ++i) {
      root_dual_ += std::max(0.0, lagrangian_score(inst_, i, lp.prices));
    }

    // Rounding can fail only under tolerance pathologies; the cheapest
    // coverage core then stands in.
    std::vector<std::uint8_t> seed;
    double seed_cost = 0.0;
    try {
      BinaryAllocation rounded = round_lp_to_feasible(lp, inst_);
      seed = rounded.decisions();
      seed_cost = rounded.cost();
    } catch (const Error&) {
      seed.assign(n_, 0);
      std::vector<std::size_t> by_cost(n_);
      std::iota(by_cost.begin(), by_cost.end(), std::size_t{0});
      std::sort(by_cost.begin(), by_cost.end(), [&](std::size_t a, std::size_t b) {
        if (inst_.costs[a] != inst_.costs[b]) return inst_.costs[a] < inst_.costs[b];
        return a < b;
      });
      for (std::int64_t k = 0; k < inst_.coverage_floor; ++k) {
        seed[by_cost[static_cast<std::size_t>(k)]] = 1;
        seed_cost += inst_.costs[by_cost[static_cast<std::size_t>(k)]];
      }
    }
    full_order_ = detail::ratio_descending_order(inst_.values, inst_.costs);
    for (const std::size_t i : full_order_) {
      if (inst_.values[i] <= 0.0) break;
      if (!seed[i] && seed_cost + inst_.costs[i] <= budget_cap_) {
        seed[i] = 1;
        seed_cost += inst_.costs[i];
      }
    }
    improve_seed(seed);
    seed_decisions_ = std::move(seed);
    seed_value_ = BinaryAllocation(inst_, seed_decisions_).value();

    // Also seed from the greedy price search: a degraded best-found result
    // then never reports less than either heuristic, which keeps the
    // regret and gap inequalities intact even without proof of optimality.
    try {
      GlcConfig glc_config;
      std::vector<std::uint8_t> glc_seed =
          glc_solve(inst_, glc_config).report.allocation.decisions();
      improve_seed(glc_seed);
      const double glc_value = BinaryAllocation(inst_, glc_seed).value();
      if (glc_value > seed_value_) {
        seed_decisions_ = std::move(glc_seed);
        seed_value_ = glc_value;
      }
    } catch (const Error&) {
      // the rounding-based seed stands
    }
  }

  // First-improvement local search: drops, adds and 1-1 exchanges, restricted
  // to the units whose reduced cost leaves them undecided at the seed floor.
  void improve_seed(std::vector<std::uint8_t>& seed) const {
    double cost = 0.0, value = 0.0;
    std::int64_t count = 0;
    for (std::size_t i = 0; i < n_; ++i) {
      if (seed[i]) {
        cost += inst_.costs[i];
        value += inst_.values[i];
        ++count;
      }
    }
    std::vector<std::size_t> window;
    const double floor0 = value;
    for (std::size_t i = 0; i < n_; ++i) {
      const double score = lagrangian_score(inst_, i, root_prices_);
      const bool settled = root_dual_ - std::abs(score) < floor0 - 1e-9 * std::max(1.0, floor0);
      if (!settled) window.push_back(i);
    }
    if (window.size() > 256) return;  // diminishing returns on huge windows

    for (int round = 0; round < 64; ++round) {
      bool improved = false;
      for (const std::size_t a : window) {
        if (seed[a] && inst_.values[a] < 0.0 && count - 1 >= inst_.coverage_floor) {
          seed[a] = 0;
          cost -= inst_.costs[a];
          value -= inst_.values[a];
          --count;
          improved = true;
        } else if (!seed[a] && inst_.values[a] > 0.0 && cost + inst_.costs[a] <= budget_cap_) {
          seed[a] = 1;
          cost += inst_.costs[a];
          value += inst_.values[a];
          ++count;
          improved = true;
        }
      }
      for (const std::size_t a : window) {
        if (!seed[a]) continue;
        for (const std::size_t b : window) {
          if (seed[b] || b == a) continue;
          if (inst_.values[b] > inst_.values[a] &&
              cost - inst_.costs[a] + inst_.costs[b] <= budget_cap_) {
            seed[a] = 0;
            seed[b] = 1;
            cost += inst_.costs[b] - inst_.costs[a];
            value += inst_.values[b] - inst_.values[a];
            improved = true;
            break;  // a is out; move to the next taken unit
          }
        }
      }
      if (!improved) break;
    }
  }

  // Reduced-cost fixing against a value floor: flipping unit i away from its
  // score sign costs at least |score_i| off the dual bound; if that lands
  // below the floor, every optimum agrees with the sign.
  void build_reduction(double floor_value) {
    fixed_decisions_.assign(n_, 0);
    std::vector<std::uint8_t> is_fixed(n_, 0);
    const double margin = 1e-9 * std::max(1.0, std::abs(floor_value));
    double fix_cost = 0.0;
    std::int64_t fix_count = 0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double score = lagrangian_score(inst_, i, root_prices_);
      if (root_dual_ - std::max(0.0, score) < floor_value - margin) {
        fixed_decisions_[i] = 1;  // forced into every optimum
        is_fixed[i] = 1;
        fix_cost += inst_.costs[i];
        ++fix_count;
      } else if (root_dual_ - std::max(0.0, -score) < floor_value - margin) {
        is_fixed[i] = 1;  // forced out
      }
    }

    // Fixing must leave a consistent subproblem; otherwise fall back to the
    // full search (can only happen under float dust on the margins).
    const std::size_t active = n_ - static_cast<std::size_t>(std::count(
                                        is_fixed.begin(), is_fixed.end(), std::uint8_t{1}));
    const bool consistent =
        fix_cost <= budget_cap_ &&
        static_cast<std::int64_t>(active) + fix_count >= inst_.coverage_floor;
    if (!consistent) {
      fixed_decisions_.assign(n_, 0);
      std::fill(is_fixed.begin(), is_fixed.end(), std::uint8_t{0});
      fix_cost = 0.0;
      fix_count = 0;
    }

    fixed_cost_ = fix_cost;
    fixed_count_ = fix_count;
    fixed_value_ = BinaryAllocation(inst_, fixed_decisions_).value();
    order_.clear();
    for (const std::size_t i : full_order_) {
      if (!is_fixed[i]) order_.push_back(i);
    }

    // Positive-value active units in ratio order, with prefix sums, drive
    // the residual fractional-knapsack fill.
    positive_positions_.clear();
    for (std::size_t pos = 0; pos < order_.size(); ++pos) {
      if (inst_.values[order_[pos]] > 0.0) positive_positions_.push_back(pos);
    }
    positive_cost_prefix_.assign(positive_positions_.size() + 1, 0.0);
    positive_value_prefix_.assign(positive_positions_.size() + 1, 0.0);
    for (std::size_t i = 0; i < positive_positions_.size(); ++i) {
      const std::size_t unit = order_[positive_positions_[i]];
      positive_cost_prefix_[i + 1] = positive_cost_prefix_[i] + inst_.costs[unit];
      positive_value_prefix_[i + 1] = positive_value_prefix_[i] + inst_.values[unit];
    }

    // Sum of the j cheapest active costs in each position suffix, for
    // detecting subtrees whose coverage remainder cannot fit the budget.
    // Quadratic in the active count, so only kept for moderate sizes.
    cheapest_suffix_.clear();
    if (order_.size() <= 1024) {
      cheapest_suffix_.assign(order_.size() + 1, {});
      std::vector<double> tail;
      for (std::size_t d = order_.size(); d-- > 0;) {
        tail.push_back(inst_.costs[order_[d]]);
        std::sort(tail.begin(), tail.end());
        auto& sums = cheapest_suffix_[d];
        sums.assign(tail.size() + 1, 0.0);
        for (std::size_t j = 0; j < tail.size(); ++j) sums[j + 1] = sums[j] + tail[j];
      }
    }

    // Strict-dominance masks: a strictly more valuable and strictly cheaper
    // unit is treated in every optimum whenever the worse one is, so
    // skipping the better forces skipping the worse. Only pairs where the
    // dominator precedes the dominated are usable along the search order.
    dominated_mask_.clear();
    use_dominance_ = order_.size() <= 128;
    if (use_dominance_) {
      dominated_mask_.assign(order_.size(), 0);
      for (std::size_t p = 0; p < order_.size(); ++p) {
        for (std::size_t q = p + 1; q < order_.size(); ++q) {
          if (inst_.values[order_[p]] > inst_.values[order_[q]] &&
              inst_.costs[order_[p]] < inst_.costs[order_[q]]) {
            dominated_mask_[p] |= static_cast<unsigned __int128>(1) << q;
          }
        }
      }
    }
  }

  double prune_floor() const { return std::max(best_value_, floor_seed_); }

  // k_left = treated units still owed to the coverage floor; forced_skip
  // marks positions excluded by an earlier skip of a dominating unit.
  void explore(std::size_t depth, double budget_left, double value, std::int64_t k_left,
               unsigned __int128 forced_skip) {
    if (node_budget_hit_) return;
    if (++nodes_ > node_budget_) {
      node_budget_hit_ = true;
      return;
    }
    if (depth == order_.size()) {
      if (k_left > 0) return;
      if (value > best_value_ ||
          (value == best_value_ &&
           (best_decisions_.empty() || lex_smaller(decisions_, best_decisions_)))) {
        best_value_ = value;
        best_decisions_ = decisions_;
      }
      return;
    }

    const std::size_t unit = order_[depth];
    const double w = inst_.costs[unit];
    const double v = inst_.values[unit];

    const bool skip_forced = use_dominance_ && ((forced_skip >> depth) & 1u);
    const bool can_take =
        !skip_forced && w <= budget_left + (budget_cap_ - inst_.budget);
    const bool can_skip = static_cast<std::int64_t>(order_.size() - depth - 1) >= k_left;
    const unsigned __int128 skip_propagation =
        use_dominance_ ? forced_skip | dominated_mask_[depth] : forced_skip;

    double take_bound = -std::numeric_limits<double>::infinity();
    double skip_bound = -std::numeric_limits<double>::infinity();
    if (can_take) {
      take_bound = value + v +
                   residual_bound(depth + 1, budget_left - w, std::max<std::int64_t>(0, k_left - 1));
    }
    if (can_skip) {
      skip_bound = value + residual_bound(depth + 1, budget_left, k_left);
    }

    const auto visit = [&](bool take, double bound) {
      if (!std::isfinite(bound)) return;
      const double floor = prune_floor();
      const double prune_tol = 1e-9 * std::max(1.0, std::abs(floor));
      if (bound >= floor - prune_tol) {
        decisions_[unit] = take ? 1 : 0;
        if (take) {
          explore(depth + 1, budget_left - w, value + v, std::max<std::int64_t>(0, k_left - 1),
                  forced_skip);
        } else {
          explore(depth + 1, budget_left, value, k_left, skip_propagation);
        }
        decisions_[unit] = 0;
      } else if (options_.prune_log != nullptr) {
        log_prune(depth, take, bound, floor);
      }
    };

    if (take_bound >= skip_bound) {
      visit(true, take_bound);
      visit(false, skip_bound);
    } else {
      visit(false, skip_bound);
      visit(true, take_bound);
    }
  }

  // Upper bound on the best completion over active positions [depth, ...)
  // given the remaining budget and owed coverage. The coverage-free
  // fractional knapsack is exact when the floor is slack at its optimum;
  // otherwise the pinned dual minimization tightens it.
  double residual_bound(std::size_t depth, double budget_left, std::int64_t k_left) {
    if (k_left > static_cast<std::int64_t>(order_.size() - depth)) {
      return -std::numeric_limits<double>::infinity();
    }
    budget_left = std::max(0.0, budget_left);
    if (!cheapest_suffix_.empty() && k_left > 0) {
      const auto& sums = cheapest_suffix_[depth];
      if (sums[static_cast<std::size_t>(k_left)] > budget_left + (budget_cap_ - inst_.budget)) {
        return -std::numeric_limits<double>::infinity();
      }
    }

    // Fractional fill of positive-ratio units at positions >= depth.
    const auto begin_it =
        std::lower_bound(positive_positions_.begin(), positive_positions_.end(), depth);
    const std::size_t i0 = static_cast<std::size_t>(begin_it - positive_positions_.begin());
    const std::size_t count = positive_positions_.size();
    std::size_t lo = i0, hi = count;
    while (lo < hi) {  // largest j with prefix cost <= budget_left
      const std::size_t mid = lo + (hi - lo + 1) / 2;
      if (positive_cost_prefix_[mid] - positive_cost_prefix_[i0] <= budget_left) {
        lo = mid;
      } else {
        hi = mid - 1;
      }
    }
    const std::size_t j = lo;
    double fill_value = positive_value_prefix_[j] - positive_value_prefix_[i0];
    double fill_mass = static_cast<double>(j - i0);
    if (j < count) {
      const std::size_t unit = order_[positive_positions_[j]];
      const double leftover = budget_left - (positive_cost_prefix_[j] - positive_cost_prefix_[i0]);
      const double frac = std::max(0.0, leftover / inst_.costs[unit]);
      fill_value += frac * inst_.values[unit];
      fill_mass += frac;
    }

    if (fill_mass >= static_cast<double>(k_left)) return fill_value;

    // The coverage-free value already suffices when the caller will prune on
    // it; skip the tighter dual minimization in that case.
    const double floor = prune_floor();
    if (fill_value < floor - 1e-9 * std::max(1.0, std::abs(floor))) return fill_value;

    return std::min(fill_value, pinned_dual_bound(depth, budget_left, k_left));
  }

  // Weak-duality bound when the floor binds: minimize over lambda the dual
  //   g(lambda) = lambda * b + sum of the k best scores        (k-th <= 0)
  //   g(lambda) = lambda * b + sum of all positive scores      (k-th  > 0)
  // which is convex piecewise-linear; bisect on the sign of b minus the
  // selection cost and keep the lowest evaluation (every one is valid).
  double pinned_dual_bound(std::size_t depth, double budget_left, std::int64_t k_left) {
    const auto evaluate = [&](double lambda, double& selection_cost) {
      pair_scratch_.clear();
      for (std::size_t pos = depth; pos < order_.size(); ++pos) {
        const std::size_t unit = order_[pos];
        pair_scratch_.emplace_back(inst_.values[unit] - lambda * inst_.costs[unit],
                                   inst_.costs[unit]);
      }
      const auto kth = pair_scratch_.begin() + (k_left - 1);
      std::nth_element(pair_scratch_.begin(), kth, pair_scratch_.end(),
                       [](const auto& a, const auto& b) { return a.first > b.first; });
      double sum_top = 0.0;
      selection_cost = 0.0;
      for (auto it = pair_scratch_.begin(); it != kth + 1; ++it) {
        sum_top += it->first;
        selection_cost += it->second;
      }
      if (kth->first <= 0.0) return lambda * budget_left + sum_top;
      double positive = 0.0;
      for (const auto& entry : pair_scratch_) {
        if (entry.first > 0.0) positive += entry.first;
      }
      return lambda * budget_left + positive;
    };

    double cost_at = 0.0;
    double best = evaluate(0.0, cost_at);
    if (cost_at <= budget_left) return best;  // subgradient >= 0 at zero

    double lo = 0.0, hi = 1.0;
    for (int step = 0; step < 60; ++step) {
      best = std::min(best, evaluate(hi, cost_at));
      if (cost_at <= budget_left) break;
      lo = hi;
      hi *= 2.0;
    }
    for (int step = 0; step < 12; ++step) {
      const double mid = 0.5 * (lo + hi);
      best = std::min(best, evaluate(mid, cost_at));
      if (cost_at > budget_left) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return best;
  }

  void log_prune(std::size_t depth, bool take, double bound, double incumbent) {
    PrunedNode node;
    node.fixed = decisions_;
    node.fixed[order_[depth]] = take ? 1 : 0;
    node.is_free.assign(n_, 0);
    for (std::size_t pos = depth + 1; pos < order_.size(); ++pos) node.is_free[order_[pos]] = 1;
    node.upper_bound = bound;
    node.incumbent = incumbent;
    options_.prune_log->push_back(std::move(node));
  }

  const ProblemInstance& inst_;
  const ExactOptions& options_;
  std::size_t n_;
  double budget_cap_ = 0.0;

  DualPrices root_prices_;
  double root_dual_ = 0.0;
  std::vector<std::size_t> full_order_;
  std::vector<std::uint8_t> seed_decisions_;
  double seed_value_ = 0.0;
  std::vector<std::uint8_t> fixed_decisions_;
  double fixed_cost_ = 0.0;
  double fixed_value_ = 0.0;
  std::int64_t fixed_count_ = 0;

  std::vector<std::size_t> order_;  // active units only, ratio descending
  std::vector<std::size_t> positive_positions_;
  std::vector<double> positive_cost_prefix_;
  std::vector<double> positive_value_prefix_;
  std::vector<std::vector<double>> cheapest_suffix_;
  std::vector<unsigned __int128> dominated_mask_;
  bool use_dominance_ = false;
  std::vector<std::pair<double, double>> pair_scratch_;

  double floor_seed_ = 0.0;
  std::int64_t node_budget_ = 0;
  std::vector<std::uint8_t> decisions_;
  std::vector<std::uint8_t> best_decisions_;
  double best_value_ = 0.0;
  std::int64_t nodes_ = 0;
  bool node_budget_hit_ = false;
};

}  // namespace

SolveReport solve_exact(const ProblemInstance& inst, const ExactOptions& options) {
  validate_instance(inst);
  if (!is_instance_feasible(inst)) {
    throw Error(ErrorKind::kInfeasible, "coverage floor cannot be met within the budget");
  }
  BranchAndBound solver(inst, options);
  return solver.run();
}

SolveReport solve_exhaustive(const ProblemInstance& inst) {
  validate_instance(inst);
  const std::size_t n = inst.size();
  if (n > 25) {
    throw Error(ErrorKind::kTooLarge, "exhaustive enumeration supports n <= 25");
  }
  if (!is_instance_feasible(inst)) {
    throw Error(ErrorKind::kInfeasible, "coverage floor cannot be met within the budget");
  }

  const double budget_cap = inst.budget * (1.0 + kBudgetRelTol);
  double value = 0.0, cost = 0.0;
  std::int64_t count = 0;
  std::uint32_t current = 0;  // gray-coded subset, bit i = unit i

  double best_value = -std::numeric_limits<double>::infinity();
  std::uint32_t best_mask = 0;
  bool have_best = false;

  const auto mask_lex_smaller = [n](std::uint32_t a, std::uint32_t b) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint32_t bit = 1u << i;
      if ((a & bit) != (b & bit)) return (a & bit) == 0;
    }
    return false;
  };
  const auto consider = [&]() {
    if (cost > budget_cap || count < inst.coverage_floor) return;
    if (!have_best || value > best_value ||
        (value == best_value && mask_lex_smaller(current, best_mask))) {
      best_value = value;
      best_mask = current;
      have_best = true;
    }
  };

  consider();  // empty set
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t t = 1; t < total; ++t) {
    const unsigned bit = std::countr_zero(t);
    const std::uint32_t flip = 1u << bit;
    current ^= flip;
    if (current & flip) {
      value += inst.values[bit];
      cost += inst.costs[bit];
      ++count;
    } else {
      value -= inst.values[bit];
      cost -= inst.costs[bit];
      --count;
    }
    consider();
  }

  std::vector<std::uint8_t> decisions(n, 0);
  for (std::size_t i = 0; i < n; ++i) decisions[i] = (best_mask >> i) & 1u;
  SolveReport report = make_report(inst, BinaryAllocation(inst, std::move(decisions)));
  report.iterations = static_cast<std::int64_t>(total);
  return report;
}

}  // namespace coverlock
