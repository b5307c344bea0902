#ifndef COVERLOCK_EXPERIMENTS_HPP
#define COVERLOCK_EXPERIMENTS_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "coverlock/glc.hpp"
#include "coverlock/instance.hpp"

namespace coverlock {

inline constexpr std::uint64_t kDefaultSeed = 20240601;

// First study: linear effects on two covariates, log-normal costs with
// dispersion gamma, per-capita budget and coverage share converted to totals.
struct Dgp1Config {
  std::int64_t n = 100;
  int covariate_dim = 2;
  double gamma = 2.0;
  double budget_per_capita = 0.6;
  double coverage_share = 0.3;
  std::uint64_t seed = kDefaultSeed;
};

// Second study: scalar confounder, quadratic effect heterogeneity and
// absolute-value cost heterogeneity controlled by delta. The quadratic
// coefficient keeps the positive-effect share (~0.66) above the high
// coverage share, which the constant-cost scenarios need to stay slack.
struct Dgp2Config {
  std::int64_t n = 500;
  double beta0 = 0.0;
  double beta1 = 1.0;
  double gamma_sq = 1.0;
  double base_cost = 1.0;
  double delta = 1.0;
  double budget_per_capita = 0.8;
  double rho = 0.5;
  std::int64_t replications = 100;
  std::uint64_t seed = kDefaultSeed;
};

// `attempt` shifts the substream when an infeasible draw must be replaced.
ProblemInstance dgp1_sample(const Dgp1Config& cfg, std::int64_t replication,
                            std::int64_t attempt = 0);

struct Dgp2Draw {
  ProblemInstance instance;
  std::vector<double> xs;  // the confounder, kept for boundary plots
};

Dgp2Draw dgp2_sample(const Dgp2Config& cfg, std::int64_t replication, std::int64_t attempt = 0);

// One line of the first study's table; all value columns are per capita.
// mean_vmax (mean per-replication max |v|) backs the gap-bound checks and
// stays out of the CSV schema.
struct Mc1Row {
  std::int64_t n = 0;
  double opt_value = 0.0;
  double glc_value = 0.0;
  double glc_regret = 0.0;
  double lp_gap = 0.0;
  double lp_frac = 0.0;
  double mean_vmax = 0.0;
  std::int64_t resamples = 0;
};

struct Mc1Result {
  std::vector<Mc1Row> rows;  // sorted by n
  // Per-replication distributions behind the quantile bands, same order as rows.
  std::vector<std::vector<double>> regrets_by_n;
  std::vector<std::vector<double>> gaps_by_n;
};

using Dgp1Sampler =
    std::function<ProblemInstance(const Dgp1Config&, std::int64_t, std::int64_t)>;

// Solves every replication with the exact, LP and GLC rules and aggregates
// the per-capita means. Infeasible draws are replaced from shifted
// substreams; more than 50% replacements at any n aborts the study.
Mc1Result run_mc1(const std::vector<std::int64_t>& grid, const Dgp1Config& base,
                  std::int64_t replications, const GlcConfig& glc_config = {},
                  const Dgp1Sampler& sampler = dgp1_sample);

struct Mc2Scenario {
  std::string label;
  double delta = 0.0;
  double rho = 0.0;
};

// The four reference scenarios: (1) heterogeneous costs + high coverage,
// (2) heterogeneous costs + low coverage, (3)/(4) constant costs.
std::vector<Mc2Scenario> default_mc2_scenarios(double delta_high = 1.0, double rho_high = 0.5,
                                               double rho_low = 0.1);

struct Mc2Row {
  std::string scenario;
  double cost_het = 0.0;
  double rho = 0.0;
  double mean_nu = 0.0;
  bool binding = false;  // mean_nu > 1e-6
  double misallocation_area = 0.0;
  std::int64_t resamples = 0;
};

// Per replication: LP prices and treated count, rank-and-cut calibrated to
// that count, and the disagreement fraction between the two policies.
// `unit_dump` (optional) receives the per-unit diagnostic table of the first
// scenario's first replication.
std::vector<Mc2Row> run_mc2(const std::vector<Mc2Scenario>& scenarios, const Dgp2Config& base,
                            std::string* unit_dump = nullptr);

struct SeriesRow {
  std::string series;  // "glc_regret" or "lp_gap"
  std::int64_t n = 0;
  double mean = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
};

// Plot data behind the regret/gap curves: means with interquartile bands.
std::vector<SeriesRow> regret_curve_data(const Mc1Result& result);

std::string mc1_csv(const std::vector<Mc1Row>& rows);
std::string mc2_csv(const std::vector<Mc2Row>& rows);
std::string series_csv(const std::vector<SeriesRow>& rows);

// Replication-level parallelism, capped by the COVERLOCK_THREADS variable.
int effective_threads();
void parallel_for(std::int64_t count, const std::function<void(std::int64_t)>& body);

}  // namespace coverlock

#endif  // COVERLOCK_EXPERIMENTS_HPP
