#include <cmath>
#include <sstream>

#include <omp.h>

#include "doctest.h"
#include "idm/errors.hpp"
#include "idm/rng.hpp"
#include "idm/simulation.hpp"

using namespace idm;

namespace {

const std::vector<double> kEvalTimes{30, 40, 50, 60, 70, 80, 90, 100};
// Monte-Carlo approximation of the truth reported alongside the scenario.
const std::vector<double> kPublishedTruth{0.201, 0.162, 0.125, 0.092, 0.067, 0.048, 0.033, 0.023};

std::string table_csv(const BiasVarianceTable& table) {
  std::ostringstream out;
  write_bias_variance_csv(out, table);
  return out.str();
}

}  // namespace

TEST_CASE("closed-form truth agrees with the published approximation") {
  for (std::size_t i = 0; i < kEvalTimes.size(); ++i) {
    CAPTURE(kEvalTimes[i]);
    CHECK(std::fabs(true_p01(TransitionQuery::make(10, kEvalTimes[i])) - kPublishedTruth[i]) <= 0.002);
  }
}

TEST_CASE("closed-form truth shape") {
  CHECK(true_p01(TransitionQuery::make(10, 10)) == 0.0);
  CHECK(true_p01(TransitionQuery::make(10, 5000)) < 1e-12);
  double prev = 0.0;
  for (double t = 10.0; t <= 17.0; t += 0.5) {
    const double v = true_p01(TransitionQuery::make(10, t));
    CHECK(v >= prev);
    prev = v;
  }
  // Before t reaches factor * s nobody who falls ill after s can be absorbed.
  const ScenarioConfig cfg;
  const double p_ill = cfg.hazard_ill / (cfg.hazard_ill + cfg.hazard_direct);
  const double rate = cfg.hazard_ill + cfg.hazard_direct;
  CHECK(true_p01(TransitionQuery::make(10, 15)) == doctest::Approx(p_ill * (1 - std::exp(-rate * 5))));
}

TEST_CASE("skew-normal draws have the textbook mean") {
  auto rng = substream(3, 0);
  const SkewNormal dist;
  double sum = 0.0;
  const int m = 200000;
  for (int i = 0; i < m; ++i) sum += sample_skew_normal(rng, dist);
  const double delta = dist.shape / std::sqrt(1 + dist.shape * dist.shape);
  const double mean = dist.location + dist.scale * delta * std::sqrt(2.0 / M_PI);
  CHECK(sum / m == doctest::Approx(mean).epsilon(0.01));
}

TEST_CASE("simulated state-0 sojourn and illness fraction") {
  ScenarioConfig cfg;
  cfg.n = 100000;
  cfg.censor_hazard = 1e-12;
  const auto cohort = simulate_cohort(cfg, 0);
  double sum = 0.0;
  int ill = 0;
  for (const auto& r : cohort) {
    sum += r.exit0;
    if (r.cause0 == FirstExit::ToIll) {
      ++ill;
      CHECK(*r.exit1 == doctest::Approx(cfg.progression_factor * r.exit0));
    }
  }
  CHECK(std::fabs(sum / cohort.size() - 1.0 / 0.065) < 0.2);
  CHECK(std::fabs(static_cast<double>(ill) / cohort.size() - 0.6) < 0.01);
}

TEST_CASE("left truncation keeps about 85 of 100 subjects") {
  auto cfg = ScenarioConfig::table3();
  double total = 0.0;
  const int reps = 400;
  for (int rep = 0; rep < reps; ++rep) {
    const auto cohort = simulate_cohort(cfg, static_cast<std::uint64_t>(rep));
    total += static_cast<double>(cohort.size());
    for (const auto& r : cohort) CHECK(r.entry < r.final_time());
  }
  CHECK(std::fabs(total / reps - 85.0) <= 2.0);
}

TEST_CASE("cohort draws are deterministic per replication index") {
  const auto cfg = ScenarioConfig::table3();
  CHECK(simulate_cohort(cfg, 12) == simulate_cohort(cfg, 12));
  CHECK_FALSE(simulate_cohort(cfg, 12) == simulate_cohort(cfg, 13));
}

TEST_CASE("near-zero censoring makes mm and check coincide") {
  ScenarioConfig cfg;
  cfg.censor_hazard = 1e-12;
  for (std::uint64_t rep = 0; rep < 20; ++rep) {
    const auto cohort = simulate_cohort(cfg, rep);
    const auto q = TransitionQuery::make(10, 50);
    CHECK(p01_mm(cohort, q).value == doctest::Approx(p01_check(cohort, q).value).epsilon(1e-12));
    CHECK(p01_check(cohort, q).value == doctest::Approx(multinomial_uncensored(cohort, q)).epsilon(1e-12));
  }
}

TEST_CASE("parallel Monte Carlo matches the serial reference bit for bit") {
  auto cfg = ScenarioConfig::table1();
  cfg.replications = 60;
  const std::vector<Method> methods{Method::Check, Method::MM, Method::AalenJohansen};
  const auto serial = table_csv(run_monte_carlo_serial(cfg, methods, kEvalTimes, 10));
  for (int threads : {1, 2, 3, 4}) {
    omp_set_num_threads(threads);
    CHECK(table_csv(run_monte_carlo(cfg, methods, kEvalTimes, 10)) == serial);
  }
  omp_set_num_threads(1);
}

TEST_CASE("bias-variance table layout") {
  auto cfg = ScenarioConfig::table3();
  cfg.replications = 30;
  const auto table = run_monte_carlo(cfg, {Method::AalenJohansen, Method::Check}, {30, 50}, 10);
  REQUIRE(table.rows.size() == 4);
  CHECK(table.rows[0].estimator == Method::AalenJohansen);
  CHECK(table.rows[2].estimator == Method::Check);
  CHECK(table.rows[3].t == 50);
  CHECK(table.replications == 30);
  for (const auto& row : table.rows) {
    CHECK(row.variance >= 0.0);
    CHECK(row.n_effective + row.n_excluded == 30);
    CHECK(row.bias == doctest::Approx(row.mean_estimate - row.truth));
  }
  REQUIRE(table.find(Method::Check, 50) != nullptr);
  CHECK(table.find(Method::MM, 50) == nullptr);
  CHECK(table_csv(table).rfind("estimator,s,t,bias,variance,n_effective,n_excluded\n", 0) == 0);
}

TEST_CASE("truncated cohorts exclude the full-cohort estimators") {
  auto cfg = ScenarioConfig::table3();
  cfg.replications = 5;
  const auto table = run_monte_carlo(cfg, {Method::MM}, {50}, 10);
  CHECK(table.rows[0].n_excluded == 5);
  CHECK(table.rows[0].n_effective == 0);
}

TEST_CASE("scenario validation and config files") {
  ScenarioConfig bad;
  bad.progression_factor = 1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = {};
  bad.n = 1;
  CHECK_THROWS_AS(bad.validate(), Error);

  std::istringstream in(
      "# custom scenario\n"
      "n = 250\n"
      "censor_hazard=0.02\n"
      "truncation = 1\n"
      "truncation_location = -3\n");
  const auto cfg = read_scenario_config(in);
  CHECK(cfg.n == 250);
  CHECK(cfg.censor_hazard == 0.02);
  REQUIRE(cfg.truncation.has_value());
  CHECK(cfg.truncation->location == -3);
  CHECK(cfg.truncation->scale == 10);
  CHECK(cfg.hazard_ill == 0.039);

  std::istringstream unknown("colour = red\n");
  CHECK_THROWS_AS(read_scenario_config(unknown), Error);
  std::istringstream junk("n = lots\n");
  CHECK_THROWS_AS(read_scenario_config(junk), Error);
}

TEST_CASE("Markov scenario truth") {
  const MarkovConfig cfg;
  CHECK(markov_true_p01(TransitionQuery::make(5, 5), cfg) == 0.0);
  // Dense simulation agrees with the closed form.
  MarkovConfig big = cfg;
  big.n = 200000;
  big.censor_hazard = 1e-12;
  const auto cohort = simulate_markov_cohort(big, 1, 0);
  const auto q = TransitionQuery::make(10, 30);
  CHECK(multinomial_uncensored(cohort, q) == doctest::Approx(markov_true_p01(q, cfg)).epsilon(0.02));
}
