#include "coverlock/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "coverlock/analysis.hpp"
#include "coverlock/exact.hpp"
#include "coverlock/lp.hpp"
#include "coverlock/rc.hpp"
#include "coverlock/rng.hpp"

namespace coverlock {

namespace {

constexpr std::int64_t kMaxAttemptsPerReplication = 1000;

double quantile(std::vector<double> sorted, double p) {
  if (sorted.empty()) return 0.0;
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", x);
  return buf;
}

}  // namespace

int effective_threads() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("COVERLOCK_THREADS")) {
    const long parsed = std::strtol(env, nullptr, 10);
    if (parsed >= 1 && parsed < static_cast<long>(hw)) return static_cast<int>(parsed);
    if (parsed >= static_cast<long>(hw)) return static_cast<int>(hw);
    return 1;
  }
  return static_cast<int>(hw);
}

void parallel_for(std::int64_t count, const std::function<void(std::int64_t)>& body) {
  const int threads = static_cast<int>(std::min<std::int64_t>(effective_threads(), count));
  if (threads <= 1) {
    for (std::int64_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&]() {
      while (true) {
        const std::int64_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

ProblemInstance dgp1_sample(const Dgp1Config& cfg, std::int64_t replication,
                            std::int64_t attempt) {
  if (cfg.n < 1 || cfg.covariate_dim < 2 || cfg.gamma < 0.0 || cfg.budget_per_capita <= 0.0 ||
      cfg.coverage_share <= 0.0 || cfg.coverage_share >= 1.0) {
    throw Error(ErrorKind::kInvalidInput, "invalid first-study configuration");
  }
  CounterRng rng(cfg.seed, static_cast<std::uint64_t>(cfg.n),
                 static_cast<std::uint64_t>(replication), static_cast<std::uint64_t>(attempt));
  ProblemInstance inst;
  inst.values.resize(cfg.n);
  inst.costs.resize(cfg.n);
  for (std::int64_t i = 0; i < cfg.n; ++i) {
    const double x1 = rng.normal();
    const double x2 = rng.normal();
    for (int d = 2; d < cfg.covariate_dim; ++d) rng.normal();  // unused coordinates
    inst.values[i] = x1 + 0.5 * x2;
    inst.costs[i] = std::exp(cfg.gamma * x1);
  }
  inst.budget = static_cast<double>(cfg.n) * cfg.budget_per_capita;
  inst.coverage_floor = coverage_floor_from_share(cfg.n, cfg.coverage_share);
  return inst;
}

Dgp2Draw dgp2_sample(const Dgp2Config& cfg, std::int64_t replication, std::int64_t attempt) {
  if (cfg.n < 1 || cfg.base_cost <= 0.0 || cfg.delta < 0.0 || cfg.rho <= 0.0 || cfg.rho >= 1.0 ||
      cfg.budget_per_capita <= 0.0) {
    throw Error(ErrorKind::kInvalidInput, "invalid second-study configuration");
  }
  CounterRng rng(cfg.seed ^ 0x5eed2ULL, static_cast<std::uint64_t>(cfg.n),
                 static_cast<std::uint64_t>(replication), static_cast<std::uint64_t>(attempt));
  Dgp2Draw draw;
  draw.instance.values.resize(cfg.n);
  draw.instance.costs.resize(cfg.n);
  draw.xs.resize(cfg.n);
  const double slope = cfg.beta1 - cfg.beta0;
  for (std::int64_t i = 0; i < cfg.n; ++i) {
    const double x = rng.normal();
    draw.xs[i] = x;
    draw.instance.values[i] = slope * x + cfg.gamma_sq * x * x;
    draw.instance.costs[i] = cfg.base_cost + cfg.delta * std::abs(x);
  }
  draw.instance.budget = static_cast<double>(cfg.n) * cfg.budget_per_capita;
  draw.instance.coverage_floor = coverage_floor_from_share(cfg.n, cfg.rho);
  return draw;
}

namespace {

const ProblemInstance& instance_of(const ProblemInstance& inst) { return inst; }
const ProblemInstance& instance_of(const Dgp2Draw& draw) { return draw.instance; }

// Draw until feasible, shifting the attempt substream; returns the number of
// replaced draws through `resamples`.
template <typename Sample>
auto sample_feasible(const Sample& sample, std::int64_t& resamples) {
  for (std::int64_t attempt = 0;; ++attempt) {
    if (attempt >= kMaxAttemptsPerReplication) {
      throw Error(ErrorKind::kTooManyInfeasibleDraws,
                  "replication exhausted its resample budget");
    }
    auto draw = sample(attempt);
    if (is_instance_feasible(instance_of(draw))) {
      resamples += attempt;
      return draw;
    }
  }
}

}  // namespace

Mc1Result run_mc1(const std::vector<std::int64_t>& grid, const Dgp1Config& base,
                  std::int64_t replications, const GlcConfig& glc_config,
                  const Dgp1Sampler& sampler) {
  if (grid.empty() || replications < 1) {
    throw Error(ErrorKind::kInvalidInput, "need a nonempty grid and at least one replication");
  }
  std::vector<std::int64_t> sizes(grid);
  std::sort(sizes.begin(), sizes.end());

  Mc1Result result;
  for (const std::int64_t n : sizes) {
    Dgp1Config cfg = base;
    cfg.n = n;

    struct RepOutcome {
      double opt = 0.0, glc = 0.0, gap = 0.0, frac = 0.0, vmax = 0.0;
      std::int64_t resamples = 0;
    };
    std::vector<RepOutcome> outcomes(replications);

    parallel_for(replications, [&](std::int64_t rep) {
      RepOutcome& out = outcomes[rep];
      const ProblemInstance inst = sample_feasible(
          [&](std::int64_t attempt) { return sampler(cfg, rep, attempt); }, out.resamples);
      // Deeper search than the library default; a rare straggler still
      // degrades to a flagged best-found value.
      ExactOptions exact_options;
      exact_options.node_budget = 100'000'000;
      const SolveReport exact = solve_exact(inst, exact_options);
      const LpSolution lp = solve_lp(inst);
      const GlcResult glc = glc_solve(inst, glc_config);
      const double scale = static_cast<double>(n);
      out.opt = exact.objective / scale;
      out.glc = glc.report.objective / scale;
      out.gap = (lp.objective - exact.objective) / scale;
      out.frac = static_cast<double>(lp.fractional_indices.size());
      for (const double v : inst.values) out.vmax = std::max(out.vmax, std::abs(v));
    });

    Mc1Row row;
    row.n = n;
    std::vector<double> regrets, gaps;
    regrets.reserve(replications);
    gaps.reserve(replications);
    for (const RepOutcome& out : outcomes) {
      row.opt_value += out.opt;
      row.glc_value += out.glc;
      row.lp_gap += out.gap;
      row.lp_frac += out.frac;
      row.mean_vmax += out.vmax;
      row.resamples += out.resamples;
      regrets.push_back(out.opt - out.glc);
      gaps.push_back(out.gap);
      row.glc_regret += out.opt - out.glc;
    }
    const double r = static_cast<double>(replications);
    row.opt_value /= r;
    row.glc_value /= r;
    row.glc_regret /= r;
    row.lp_gap /= r;
    row.lp_frac /= r;
    row.mean_vmax /= r;
    if (row.resamples > replications) {
      throw Error(ErrorKind::kTooManyInfeasibleDraws,
                  "more than half of the draws were infeasible; adjust budget or coverage");
    }
    result.rows.push_back(row);
    result.regrets_by_n.push_back(std::move(regrets));
    result.gaps_by_n.push_back(std::move(gaps));
  }
  return result;
}

std::vector<Mc2Scenario> default_mc2_scenarios(double delta_high, double rho_high,
                                               double rho_low) {
  return {
      {"(1)", delta_high, rho_high},
      {"(2)", delta_high, rho_low},
      {"(3)", 0.0, rho_high},
      {"(4)", 0.0, rho_low},
  };
}

std::vector<Mc2Row> run_mc2(const std::vector<Mc2Scenario>& scenarios, const Dgp2Config& base,
                            std::string* unit_dump) {
  if (scenarios.empty() || base.replications < 1) {
    throw Error(ErrorKind::kInvalidInput, "need scenarios and at least one replication");
  }

  std::vector<Mc2Row> rows;
  bool first_scenario = true;
  for (const Mc2Scenario& scenario : scenarios) {
    Dgp2Config cfg = base;
    cfg.delta = scenario.delta;
    cfg.rho = scenario.rho;

    struct RepOutcome {
      double nu = 0.0, area = 0.0;
      std::int64_t resamples = 0;
    };
    std::vector<RepOutcome> outcomes(cfg.replications);
    const bool want_dump = first_scenario && unit_dump != nullptr;

    parallel_for(cfg.replications, [&](std::int64_t rep) {
      RepOutcome& out = outcomes[rep];
      const Dgp2Draw draw = sample_feasible(
          [&](std::int64_t attempt) { return dgp2_sample(cfg, rep, attempt); }, out.resamples);
      const LpSolution lp = solve_lp(draw.instance);
      const BinaryAllocation pi_lp = round_lp_to_feasible(lp, draw.instance);
      const SolveReport rc = rc_with_target_count(draw.instance, pi_lp.count());
      out.nu = lp.prices.nu;
      out.area = misallocation_area(pi_lp, rc.allocation);
      if (want_dump && rep == 0) {
        *unit_dump = unit_table_csv(score_units(draw.instance, lp.prices), lp.prices, pi_lp,
                                    rc.allocation);
      }
    });

    Mc2Row row;
    row.scenario = scenario.label;
    row.cost_het = scenario.delta;
    row.rho = scenario.rho;
    for (const RepOutcome& out : outcomes) {
      row.mean_nu += out.nu;
      row.misallocation_area += out.area;
      row.resamples += out.resamples;
    }
    const double r = static_cast<double>(cfg.replications);
    row.mean_nu /= r;
    row.misallocation_area /= r;
    row.binding = row.mean_nu > 1e-6;
    if (row.resamples > cfg.replications) {
      throw Error(ErrorKind::kTooManyInfeasibleDraws,
                  "more than half of the draws were infeasible; adjust budget or coverage");
    }
    rows.push_back(std::move(row));
    first_scenario = false;
  }
  return rows;
}

std::vector<SeriesRow> regret_curve_data(const Mc1Result& result) {
  if (result.rows.size() < 2) {
    throw Error(ErrorKind::kInvalidInput, "need at least two sample sizes for a curve");
  }
  std::vector<SeriesRow> series;
  const auto emit = [&](const char* name, const std::vector<std::vector<double>>& samples) {
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
      std::vector<double> sorted(samples[i]);
      std::sort(sorted.begin(), sorted.end());
      SeriesRow row;
      row.series = name;
      row.n = result.rows[i].n;
      double sum = 0.0;
      for (const double x : sorted) sum += x;
      row.mean = sorted.empty() ? 0.0 : sum / static_cast<double>(sorted.size());
      row.q25 = quantile(sorted, 0.25);
      row.q75 = quantile(sorted, 0.75);
      series.push_back(std::move(row));
    }
  };
  emit("glc_regret", result.regrets_by_n);
  emit("lp_gap", result.gaps_by_n);
  return series;
}

std::string mc1_csv(const std::vector<Mc1Row>& rows) {
  std::string out = "n,opt_value,glc_value,glc_regret,lp_gap,lp_frac\n";
  for (const Mc1Row& row : rows) {
    out += std::to_string(row.n) + ',' + format_double(row.opt_value) + ',' +
           format_double(row.glc_value) + ',' + format_double(row.glc_regret) + ',' +
           format_double(row.lp_gap) + ',' + format_double(row.lp_frac) + '\n';
  }
  return out;
}

std::string mc2_csv(const std::vector<Mc2Row>& rows) {
  std::string out = "scenario,cost_het,rho,mean_nu,status,misallocation_area\n";
  for (const Mc2Row& row : rows) {
    out += row.scenario + ',' + format_double(row.cost_het) + ',' + format_double(row.rho) + ',' +
           format_double(row.mean_nu) + ',' + (row.binding ? "Binding" : "Slack") + ',' +
           format_double(row.misallocation_area) + '\n';
  }
  return out;
}

std::string series_csv(const std::vector<SeriesRow>& rows) {
  std::string out = "series,n,mean,q25,q75\n";
  for (const SeriesRow& row : rows) {
    out += row.series + ',' + std::to_string(row.n) + ',' + format_double(row.mean) + ',' +
           format_double(row.q25) + ',' + format_double(row.q75) + '\n';
  }
  return out;
}

}  // namespace coverlock
