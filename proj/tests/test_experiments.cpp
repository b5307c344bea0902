#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "coverlock/experiments.hpp"
#include "support.hpp"

using namespace coverlock;

TEST_CASE("first-study draws are deterministic and obey the stated forms") {
  Dgp1Config cfg;
  cfg.n = 200;
  cfg.seed = 42;
  const ProblemInstance a = dgp1_sample(cfg, 3);
  const ProblemInstance b = dgp1_sample(cfg, 3);
  CHECK(a.values == b.values);  // bit-identical
  CHECK(a.costs == b.costs);
  CHECK(a.budget == 200 * 0.6);
  CHECK(a.coverage_floor == 60);

  const ProblemInstance other = dgp1_sample(cfg, 4);
  CHECK(a.values != other.values);

  Dgp1Config flat = cfg;
  flat.gamma = 0.0;
  for (const double w : dgp1_sample(flat, 0).costs) CHECK(w == 1.0);
}

TEST_CASE("first-study values match the stated moments at scale") {
  Dgp1Config cfg;
  cfg.n = 100000;
  cfg.seed = 7;
  const ProblemInstance inst = dgp1_sample(cfg, 0);
  double mean = 0.0;
  for (const double v : inst.values) mean += v;
  mean /= static_cast<double>(cfg.n);
  double var = 0.0;
  for (const double v : inst.values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(cfg.n - 1);

  const double se_mean = std::sqrt(1.25 / static_cast<double>(cfg.n));
  const double se_var = 1.25 * std::sqrt(2.0 / static_cast<double>(cfg.n - 1));
  CHECK(std::abs(mean - 0.0) <= 3.0 * se_mean);
  CHECK(std::abs(var - 1.25) <= 3.0 * se_var);
}

TEST_CASE("second-study draws are deterministic and obey the stated forms") {
  Dgp2Config cfg;
  cfg.n = 150;
  cfg.seed = 9;
  const Dgp2Draw a = dgp2_sample(cfg, 1);
  const Dgp2Draw b = dgp2_sample(cfg, 1);
  CHECK(a.instance.values == b.instance.values);
  CHECK(a.xs == b.xs);

  Dgp2Config constant = cfg;
  constant.delta = 0.0;
  for (const double w : dgp2_sample(constant, 0).instance.costs) CHECK(w == 1.0);

  Dgp2Config degenerate = cfg;
  degenerate.beta1 = degenerate.beta0 = 0.4;
  degenerate.gamma_sq = 0.0;
  for (const double v : dgp2_sample(degenerate, 0).instance.values) CHECK(v == 0.0);
}

TEST_CASE("pinned-instance harness smoke test") {
  const auto pinned = [](const Dgp1Config&, std::int64_t, std::int64_t) {
    return coverlock::testing::worked_example();
  };
  Dgp1Config cfg;
  const Mc1Result result = run_mc1({6}, cfg, 1, GlcConfig{}, pinned);
  REQUIRE(result.rows.size() == 1);
  CHECK(result.rows[0].opt_value == doctest::Approx(7.0));  // 42 / 6
  CHECK(result.rows[0].glc_regret == 0.0);
  CHECK(result.rows[0].lp_gap == doctest::Approx(0.0));
  CHECK(result.rows[0].lp_frac <= 2.0);
}

TEST_CASE("small study run satisfies the row-wise invariants") {
  Dgp1Config cfg;
  cfg.seed = 5;
  const Mc1Result result = run_mc1({30, 60}, cfg, 6);
  REQUIRE(result.rows.size() == 2);
  CHECK(result.rows[0].n == 30);
  CHECK(result.rows[1].n == 60);
  for (const Mc1Row& row : result.rows) {
    CHECK(row.glc_regret >= 0.0);
    CHECK(row.lp_gap >= 0.0);
    CHECK(row.lp_frac <= 2.0);
    CHECK(row.opt_value >= row.glc_value);
  }
  // The relaxation dominates in every single replication, not just on average.
  for (const auto& gaps : result.gaps_by_n) {
    for (const double gap : gaps) CHECK(gap >= 0.0);
  }
  for (const auto& regrets : result.regrets_by_n) {
    for (const double regret : regrets) CHECK(regret >= 0.0);
  }
}

TEST_CASE("replication results do not depend on the thread schedule") {
  Dgp1Config cfg;
  cfg.seed = 15;

  setenv("COVERLOCK_THREADS", "1", 1);
  const Mc1Result serial = run_mc1({40}, cfg, 8);
  setenv("COVERLOCK_THREADS", "4", 1);
  const Mc1Result parallel = run_mc1({40}, cfg, 8);
  unsetenv("COVERLOCK_THREADS");

  REQUIRE(serial.rows.size() == parallel.rows.size());
  CHECK(serial.rows[0].opt_value == parallel.rows[0].opt_value);  // bit-identical fold
  CHECK(serial.rows[0].glc_regret == parallel.rows[0].glc_regret);
  CHECK(serial.rows[0].lp_gap == parallel.rows[0].lp_gap);
  CHECK(serial.gaps_by_n == parallel.gaps_by_n);
}

TEST_CASE("hopeless configurations abort with the draw error") {
  Dgp1Config cfg;
  cfg.budget_per_capita = 1e-9;
  cfg.coverage_share = 0.9;
  CHECK_THROWS_AS(run_mc1({30}, cfg, 2), Error);
  try {
    run_mc1({30}, cfg, 2);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kTooManyInfeasibleDraws);
  }
}

TEST_CASE("second-study scenarios aggregate nu and area") {
  Dgp2Config cfg;
  cfg.n = 80;
  cfg.replications = 4;
  cfg.seed = 21;
  std::string dump;
  const auto rows = run_mc2(default_mc2_scenarios(), cfg, &dump);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].scenario == "(1)");
  CHECK(rows[3].scenario == "(4)");
  for (const Mc2Row& row : rows) {
    CHECK(row.binding == (row.mean_nu > 1e-6));
    CHECK(row.misallocation_area >= 0.0);
    CHECK(row.misallocation_area <= 1.0);
  }
  // Constant-cost scenarios collapse onto the same ordering.
  CHECK(rows[2].misallocation_area <= 0.05);
  CHECK(rows[3].misallocation_area <= 0.05);
  CHECK(dump.rfind("index,tau,cost,ratio,margin,b_lp,pi_lp,pi_rc,disagree\n", 0) == 0);
}

TEST_CASE("curve data carries means and interquartile bands") {
  Mc1Result synthetic;
  synthetic.rows = {{50, 0, 0, 0.5, 0.1, 0, 0}, {100, 0, 0, 0.5, 0.1, 0, 0}};
  synthetic.regrets_by_n = {{0.5, 0.5, 0.5}, {0.5, 0.5, 0.5}};
  synthetic.gaps_by_n = {{0.1, 0.1, 0.1}, {0.1, 0.1, 0.1}};
  const auto series = regret_curve_data(synthetic);
  REQUIRE(series.size() == 4);  // two series over two sizes
  for (const SeriesRow& row : series) {
    const double expected = row.series == "glc_regret" ? 0.5 : 0.1;
    CHECK(row.mean == doctest::Approx(expected));
    CHECK(row.q25 == doctest::Approx(expected));  // constant rows: flat bands
    CHECK(row.q75 == doctest::Approx(expected));
  }

  Mc1Result too_small;
  too_small.rows = {{50, 0, 0, 0, 0, 0, 0}};
  too_small.regrets_by_n = {{0.1}};
  too_small.gaps_by_n = {{0.1}};
  CHECK_THROWS_AS(regret_curve_data(too_small), Error);
}

TEST_CASE("CSV schemas are byte-stable") {
  CHECK(mc1_csv({}).rfind("n,opt_value,glc_value,glc_regret,lp_gap,lp_frac\n", 0) == 0);
  CHECK(mc2_csv({}).rfind("scenario,cost_het,rho,mean_nu,status,misallocation_area\n", 0) == 0);
  CHECK(series_csv({}).rfind("series,n,mean,q25,q75\n", 0) == 0);

  Mc2Row row;
  row.scenario = "(1)";
  row.cost_het = 1;
  row.rho = 0.5;
  row.mean_nu = 0.25;
  row.binding = true;
  row.misallocation_area = 0.125;
  const std::string csv = mc2_csv({row});
  CHECK(csv.find("(1),1,0.5,0.25,Binding,0.125\n") != std::string::npos);
}
