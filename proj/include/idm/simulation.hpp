#pragma once

// Monte-Carlo scenarios for the non-Markov illness-death model
// (T = progression_factor * T0 after illness), the closed-form truth, and
// the bias/variance harness. Replications run under OpenMP; the serial
// variants are the reference the parallel ones are tested against.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <vector>

#include "idm/estimators.hpp"
#include "idm/record.hpp"

namespace idm {

struct SkewNormal {
  double location = -5.0;
  double scale = 10.0;
  double shape = 10.0;
};

struct ScenarioConfig {
  int n = 100;
  double hazard_ill = 0.039;
  double hazard_direct = 0.026;
  double progression_factor = 1.7;
  double censor_hazard = 0.013;
  std::optional<SkewNormal> truncation;
  std::uint64_t seed = 1;
  int replications = 1000;

  /// Throws InvalidArgument on non-positive hazards, factor <= 1 or n < 2.
  void validate() const;

  static ScenarioConfig table1();  // censoring hazard 0.013
  static ScenarioConfig table2();  // censoring hazard 0.035
  static ScenarioConfig table3();  // table1 plus skew-normal truncation
};

/// Flat `key = value` file mirroring ScenarioConfig; `#` starts a comment.
/// Keys: n, hazard_ill, hazard_direct, progression_factor, censor_hazard,
/// truncation (0/1), truncation_location, truncation_scale,
/// truncation_shape, seed, replications. Unset keys keep `base` values.
ScenarioConfig read_scenario_config(std::istream& in, ScenarioConfig base = {});

/// xi + omega * (delta |U0| + sqrt(1 - delta^2) U1), delta = alpha / sqrt(1 + alpha^2)
double sample_skew_normal(std::mt19937_64& rng, const SkewNormal& dist);

/// Draws cfg.n subjects from substream (cfg.seed, rep_index). Under
/// truncation, L is clamped at 0, subjects with L >= T never enter the
/// study, survivors may enter already ill, and the censoring clock starts
/// at entry. Throws DegenerateCohort if nobody enters.
Cohort simulate_cohort(const ScenarioConfig& cfg, std::uint64_t rep_index);

/// P01(s,t) for the scenario: since {t < T} = {T0 > t / factor} after illness,
///   p1 * (exp(-lambda max(s, t/factor)) - exp(-lambda t)) / exp(-lambda s).
double true_p01(const TransitionQuery& q, const ScenarioConfig& cfg = {});

/// Time-homogeneous Markov illness-death model used as a control.
struct MarkovConfig {
  int n = 5000;
  double hazard_ill = 0.039;
  double hazard_direct = 0.026;
  double hazard_ill_death = 0.05;
  double censor_hazard = 0.013;
};

Cohort simulate_markov_cohort(const MarkovConfig& cfg, std::uint64_t seed, std::uint64_t rep_index);
double markov_true_p01(const TransitionQuery& q, const MarkovConfig& cfg);

struct BiasVarianceRow {
  Method estimator = Method::Check;
  double s = 0.0;
  double t = 0.0;
  double truth = 0.0;
  double mean_estimate = 0.0;
  double bias = 0.0;
  double variance = 0.0;
  int n_effective = 0;  // replications contributing to the cell
  int n_excluded = 0;   // replications where the estimator failed
};

struct BiasVarianceTable {
  std::vector<BiasVarianceRow> rows;  // estimator-major, then eval time
  int replications = 0;
  int degenerate_replications = 0;
  double mean_cohort_size = 0.0;

  const BiasVarianceRow* find(Method m, double t) const;
};

BiasVarianceTable run_monte_carlo(const ScenarioConfig& cfg, const std::vector<Method>& estimators,
                                  const std::vector<double>& eval_times, double s);
BiasVarianceTable run_monte_carlo_serial(const ScenarioConfig& cfg, const std::vector<Method>& estimators,
                                         const std::vector<double>& eval_times, double s);

/// `estimator,s,t,bias,variance,n_effective,n_excluded`
void write_bias_variance_csv(std::ostream& out, const BiasVarianceTable& table);

}  // namespace idm
