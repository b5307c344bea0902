// coverlock: solve budget-and-coverage allocation instances and run the two
// Monte Carlo studies. Batch-oriented: JSON/CSV in, JSON/CSV out.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "coverlock/analysis.hpp"
#include "coverlock/exact.hpp"
#include "coverlock/experiments.hpp"
#include "coverlock/glc.hpp"
#include "coverlock/io.hpp"
#include "coverlock/lp.hpp"
#include "coverlock/rc.hpp"

namespace {

using coverlock::Error;
using coverlock::ErrorKind;
using ordered_json = nlohmann::ordered_json;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInfeasible:
    case ErrorKind::kTooManyInfeasibleDraws:
      return 2;
    case ErrorKind::kNoFeasibleCutoff:
    case ErrorKind::kCoreInfeasible:
      return 3;
    default:
      return 1;
  }
}

struct InstanceFlags {
  double budget = 0.0;
  std::int64_t coverage = -1;
  double budget_per_capita = 0.0;
  double coverage_share = -1.0;
};

coverlock::LoadedInstance load_instance(const std::string& path, const InstanceFlags& flags) {
  const bool is_json = path.size() >= 5 && path.substr(path.size() - 5) == ".json";
  if (is_json) return coverlock::load_instance_json(path);

  coverlock::CsvUnits units = coverlock::load_units_csv(path);
  coverlock::LoadedInstance loaded;
  loaded.instance.values = std::move(units.values);
  loaded.instance.costs = std::move(units.costs);
  const auto n = static_cast<std::int64_t>(loaded.instance.values.size());
  const bool has_totals = flags.budget > 0.0 || flags.coverage >= 0;
  const bool has_shares = flags.budget_per_capita > 0.0 || flags.coverage_share >= 0.0;
  if (has_totals == has_shares) {
    throw Error(ErrorKind::kInvalidInput,
                "CSV instances need either --budget/--coverage or the per-capita pair");
  }
  if (has_shares) {
    loaded.from_per_capita = true;
    loaded.budget_per_capita = flags.budget_per_capita;
    loaded.coverage_share = flags.coverage_share;
    loaded.instance.budget = static_cast<double>(n) * flags.budget_per_capita;
    loaded.instance.coverage_floor = coverlock::coverage_floor_from_share(n, flags.coverage_share);
  } else {
    loaded.instance.budget = flags.budget;
    loaded.instance.coverage_floor = flags.coverage < 0 ? 0 : flags.coverage;
  }
  coverlock::validate_instance(loaded.instance);
  return loaded;
}

void echo_conversion(const coverlock::LoadedInstance& loaded) {
  if (!loaded.from_per_capita) return;
  std::fprintf(stderr,
               "converted per-capita constraints: C=%g rho=%g -> budget=%g coverage_floor=%lld\n",
               loaded.budget_per_capita, loaded.coverage_share, loaded.instance.budget,
               static_cast<long long>(loaded.instance.coverage_floor));
}

struct MethodRun {
  coverlock::SolveReport report;
  std::optional<coverlock::LpSolution> lp;  // present for method "lp"
};

MethodRun run_method(const coverlock::ProblemInstance& inst, const std::string& method,
                     const coverlock::GlcConfig& glc_config) {
  MethodRun run;
  if (method == "exact") {
    run.report = coverlock::solve_exact(inst);
  } else if (method == "lp") {
    coverlock::LpSolution lp = coverlock::solve_lp(inst);
    run.report = coverlock::make_report(inst, coverlock::round_lp_to_feasible(lp, inst));
    run.report.dual_prices = lp.prices;
    run.report.fractional_count = static_cast<int>(lp.fractional_indices.size());
    run.report.iterations = lp.iterations;
    run.lp = std::move(lp);
  } else if (method == "glc") {
    run.report = coverlock::glc_solve(inst, glc_config).report;
  } else if (method == "rc-prefix") {
    run.report = coverlock::rc_prefix_solve(inst);
  } else if (method == "rc-skip") {
    run.report = coverlock::rc_greedy_skip_solve(inst);
  } else {
    throw Error(ErrorKind::kInvalidInput, "unknown method: " + method);
  }
  return run;
}

ordered_json report_json(const coverlock::ProblemInstance& inst, const std::string& method,
                         const MethodRun& run) {
  const coverlock::SolveReport& report = run.report;
  ordered_json doc;
  doc["schema"] = 1;
  doc["method"] = method;
  doc["n"] = inst.size();
  doc["budget"] = inst.budget;
  doc["coverage_floor"] = inst.coverage_floor;
  doc["objective"] = report.objective;
  doc["cost"] = report.budget_used;
  doc["coverage"] = report.coverage_used;
  doc["budget_binding"] = report.budget_binding;
  doc["coverage_binding"] = report.coverage_binding;
  doc["feasible"] = report.feasible;
  doc["optimal"] = report.optimal;
  if (report.dual_prices) {
    doc["dual_prices"] = {{"lambda", report.dual_prices->lambda},
                          {"nu", report.dual_prices->nu}};
  }
  if (run.lp) {
    doc["lp_objective"] = run.lp->objective;
    doc["fractional_count"] = report.fractional_count;
  }
  doc["iterations"] = report.iterations;
  std::vector<int> decisions(report.allocation.size());
  for (std::size_t i = 0; i < report.allocation.size(); ++i) {
    decisions[i] = report.allocation.treated(i) ? 1 : 0;
  }
  doc["decisions"] = decisions;
  return doc;
}

std::vector<std::int64_t> parse_grid(const std::string& text) {
  std::vector<std::int64_t> grid;
  const auto parse_int = [](const std::string& s) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return static_cast<std::int64_t>(v);
    } catch (const std::exception&) {
      throw Error(ErrorKind::kInvalidInput, "bad grid entry: " + s);
    }
  };
  const auto range_pos = text.find("..");
  if (range_pos != std::string::npos) {
    const auto step_pos = text.find("..", range_pos + 2);
    const std::int64_t lo = parse_int(text.substr(0, range_pos));
    const std::int64_t hi = step_pos == std::string::npos
                                ? parse_int(text.substr(range_pos + 2))
                                : parse_int(text.substr(range_pos + 2, step_pos - range_pos - 2));
    const std::int64_t step =
        step_pos == std::string::npos ? 1 : parse_int(text.substr(step_pos + 2));
    if (step < 1 || hi < lo) throw Error(ErrorKind::kInvalidInput, "bad grid range: " + text);
    for (std::int64_t n = lo; n <= hi; n += step) grid.push_back(n);
    return grid;
  }
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string item =
        comma == std::string::npos ? text.substr(start) : text.substr(start, comma - start);
    if (!item.empty()) grid.push_back(parse_int(item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (grid.empty()) throw Error(ErrorKind::kInvalidInput, "empty sample-size grid");
  return grid;
}

int cmd_solve(const std::string& input, const std::string& method, const InstanceFlags& flags,
              const coverlock::GlcConfig& glc_config) {
  const coverlock::LoadedInstance loaded = load_instance(input, flags);
  echo_conversion(loaded);
  const MethodRun run = run_method(loaded.instance, method, glc_config);
  std::cout << report_json(loaded.instance, method, run).dump(2) << "\n";
  return 0;
}

int cmd_mc1(const std::string& grid_text, std::int64_t reps, coverlock::Dgp1Config cfg,
            const std::string& out_path, const std::string& plot_path) {
  const std::vector<std::int64_t> grid = parse_grid(grid_text);
  std::fprintf(stderr, "mc1: reps=%lld seed=%llu C=%g rho=%g gamma=%g (W=n*C, K=ceil(n*rho))\n",
               static_cast<long long>(reps), static_cast<unsigned long long>(cfg.seed),
               cfg.budget_per_capita, cfg.coverage_share, cfg.gamma);
  const coverlock::Mc1Result result = coverlock::run_mc1(grid, cfg, reps);
  coverlock::write_text_file(out_path, coverlock::mc1_csv(result.rows));
  std::int64_t resamples = 0;
  for (const auto& row : result.rows) resamples += row.resamples;
  std::fprintf(stderr, "mc1: wrote %s (%zu rows, %lld resampled draws)\n", out_path.c_str(),
               result.rows.size(), static_cast<long long>(resamples));
  if (!plot_path.empty()) {
    coverlock::write_text_file(plot_path, coverlock::series_csv(coverlock::regret_curve_data(result)));
    std::fprintf(stderr, "mc1: wrote %s\n", plot_path.c_str());
  }
  return 0;
}

int cmd_mc2(coverlock::Dgp2Config cfg, double delta_high, double rho_high, double rho_low,
            const std::string& out_path, const std::string& dump_units_path) {
  std::fprintf(stderr, "mc2: n=%lld reps=%lld seed=%llu B=%g (budget=n*B, K=ceil(n*rho))\n",
               static_cast<long long>(cfg.n), static_cast<long long>(cfg.replications),
               static_cast<unsigned long long>(cfg.seed), cfg.budget_per_capita);
  std::string unit_dump;
  const auto scenarios = coverlock::default_mc2_scenarios(delta_high, rho_high, rho_low);
  const auto rows =
      coverlock::run_mc2(scenarios, cfg, dump_units_path.empty() ? nullptr : &unit_dump);
  coverlock::write_text_file(out_path, coverlock::mc2_csv(rows));
  std::fprintf(stderr, "mc2: wrote %s (%zu scenarios)\n", out_path.c_str(), rows.size());
  if (!dump_units_path.empty()) {
    coverlock::write_text_file(dump_units_path, unit_dump);
    std::fprintf(stderr, "mc2: wrote %s\n", dump_units_path.c_str());
  }
  return 0;
}

int cmd_analyze(const std::string& input, const std::string& method_a,
                const std::string& method_b, const InstanceFlags& flags,
                const coverlock::GlcConfig& glc_config, double margin_constant, double tau_bound,
                double t_star_override, bool has_t_star) {
  const coverlock::LoadedInstance loaded = load_instance(input, flags);
  echo_conversion(loaded);
  const coverlock::ProblemInstance& inst = loaded.instance;

  const MethodRun run_a = run_method(inst, method_a, glc_config);
  const MethodRun run_b = run_method(inst, method_b, glc_config);
  const coverlock::LpSolution lp = run_a.lp ? *run_a.lp : coverlock::solve_lp(inst);

  const auto units = coverlock::score_units(inst, lp.prices);

  std::optional<double> t_star;
  if (has_t_star) {
    t_star = t_star_override;
  } else {
    t_star = coverlock::ratio_threshold(inst, run_b.report.allocation);
  }

  ordered_json doc;
  doc["schema"] = 1;
  doc["method_a"] = method_a;
  doc["method_b"] = method_b;
  doc["n"] = inst.size();
  doc["prices"] = {{"lambda", lp.prices.lambda}, {"nu", lp.prices.nu}};
  if (t_star) {
    double max_abs_tau = 0.0;
    for (const auto& u : units) max_abs_tau = std::max(max_abs_tau, std::abs(u.tau));
    const double effective_tau_bound = tau_bound > 0.0 ? tau_bound : max_abs_tau;
    const auto report = coverlock::misallocation_report(
        units, lp.prices, run_a.report.allocation, run_b.report.allocation, *t_star,
        margin_constant, effective_tau_bound);
    doc["misallocation_area"] = report.area;
    doc["disagreements"] = report.disagreeing.size();
    doc["t_star"] = *t_star;
    doc["delta_n"] = report.delta;
    doc["band_radius"] = report.band_radius;
    doc["band_contained"] = report.band_contained;
    doc["welfare_loss"] = report.welfare_loss;
    doc["loss_bound"] = report.loss_bound;
  } else {
    doc["misallocation_area"] =
        coverlock::misallocation_area(run_a.report.allocation, run_b.report.allocation);
    doc["t_star"] = nullptr;  // method B treats nobody: no implied threshold
  }
  std::cout << doc.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"budget- and coverage-constrained allocation solvers and experiments"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "solve one instance with a chosen method");
  std::string solve_input, solve_method;
  InstanceFlags solve_flags;
  coverlock::GlcConfig glc_config;
  solve->add_option("input", solve_input, "instance file (.json or .csv)")->required();
  solve->add_option("--method", solve_method, "exact|lp|glc|rc-prefix|rc-skip")->required();
  solve->add_option("--budget", solve_flags.budget, "total budget (CSV instances)");
  solve->add_option("--coverage", solve_flags.coverage, "coverage floor (CSV instances)");
  solve->add_option("--budget-per-capita", solve_flags.budget_per_capita);
  solve->add_option("--coverage-share", solve_flags.coverage_share);
  solve->add_option("--epsilon", glc_config.tolerance, "GLC budget-slack tolerance");
  solve->add_option("--max-iters", glc_config.max_iterations, "GLC bisection iterations");

  // mc1
  auto* mc1 = app.add_subcommand("mc1", "first study: exact vs LP vs GLC over a size grid");
  std::string mc1_grid = "50,100,200,400";
  std::int64_t mc1_reps = 50;
  coverlock::Dgp1Config dgp1;
  std::string mc1_out, mc1_plot;
  mc1->add_option("--n", mc1_grid, "sample sizes: list `50,100` or range `50..500..150`");
  mc1->add_option("--reps", mc1_reps, "replications per sample size");
  mc1->add_option("--seed", dgp1.seed);
  mc1->add_option("--C", dgp1.budget_per_capita, "per-capita budget");
  mc1->add_option("--rho", dgp1.coverage_share, "coverage share");
  mc1->add_option("--gamma", dgp1.gamma, "cost dispersion");
  mc1->add_option("--dim", dgp1.covariate_dim, "covariate dimension (>= 2)");
  mc1->add_option("--out", mc1_out, "table CSV path")->required();
  mc1->add_option("--plot-out", mc1_plot, "regret/gap series CSV path");

  // mc2
  auto* mc2 = app.add_subcommand("mc2", "second study: LP vs calibrated rank-and-cut");
  coverlock::Dgp2Config dgp2;
  double delta_high = 1.0, rho_high = 0.5, rho_low = 0.1;
  std::string mc2_out, mc2_dump;
  mc2->add_option("--n", dgp2.n);
  mc2->add_option("--reps", dgp2.replications);
  mc2->add_option("--seed", dgp2.seed);
  mc2->add_option("--beta0", dgp2.beta0);
  mc2->add_option("--beta1", dgp2.beta1);
  mc2->add_option("--gamma-sq", dgp2.gamma_sq, "quadratic effect coefficient");
  mc2->add_option("--c0", dgp2.base_cost, "base cost");
  mc2->add_option("--B", dgp2.budget_per_capita, "per-capita budget");
  mc2->add_option("--delta-high", delta_high);
  mc2->add_option("--rho-high", rho_high);
  mc2->add_option("--rho-low", rho_low);
  mc2->add_option("--out", mc2_out, "table CSV path")->required();
  mc2->add_option("--dump-units", mc2_dump, "per-unit diagnostic CSV path");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "compare two methods on one instance");
  std::string analyze_input, method_a = "lp", method_b = "rc-skip";
  InstanceFlags analyze_flags;
  double margin_constant = 1.0, tau_bound = 0.0, t_star_override = 0.0;
  analyze->add_option("input", analyze_input, "instance file (.json or .csv)")->required();
  analyze->add_option("--method-a", method_a, "reference method");
  analyze->add_option("--method-b", method_b, "candidate method");
  analyze->add_option("--budget", analyze_flags.budget);
  analyze->add_option("--coverage", analyze_flags.coverage);
  analyze->add_option("--budget-per-capita", analyze_flags.budget_per_capita);
  analyze->add_option("--coverage-share", analyze_flags.coverage_share);
  analyze->add_option("--margin-constant", margin_constant, "constant in the loss bound");
  analyze->add_option("--tau-bound", tau_bound, "bound on |tau|; defaults to the sample max");
  auto* t_star_opt = analyze->add_option("--t-star", t_star_override, "threshold override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (solve->parsed()) return cmd_solve(solve_input, solve_method, solve_flags, glc_config);
    if (mc1->parsed()) return cmd_mc1(mc1_grid, mc1_reps, dgp1, mc1_out, mc1_plot);
    if (mc2->parsed()) return cmd_mc2(dgp2, delta_high, rho_high, rho_low, mc2_out, mc2_dump);
    if (analyze->parsed()) {
      return cmd_analyze(analyze_input, method_a, method_b, analyze_flags, glc_config,
                         margin_constant, tau_bound, t_star_override, t_star_opt->count() > 0);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
