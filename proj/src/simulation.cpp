#include "idm/simulation.hpp"

#include <cmath>
#include <exception>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <string>

#include "idm/errors.hpp"
#include "idm/report.hpp"
#include "idm/rng.hpp"

namespace idm {

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& why) { throw Error(ErrorKind::InvalidArgument, "scenario: " + why); };
  if (n < 2) fail("n must be >= 2");
  if (!(hazard_ill > 0.0) || !(hazard_direct > 0.0) || !(censor_hazard > 0.0)) fail("hazards must be > 0");
  if (!(progression_factor > 1.0)) fail("progression_factor must be > 1");
  if (replications < 1) fail("replications must be >= 1");
  if (truncation && !(truncation->scale > 0.0)) fail("truncation scale must be > 0");
}

ScenarioConfig ScenarioConfig::table1() { return ScenarioConfig{}; }

ScenarioConfig ScenarioConfig::table2() {
  ScenarioConfig cfg;
  cfg.censor_hazard = 0.035;
  return cfg;
}

ScenarioConfig ScenarioConfig::table3() {
  ScenarioConfig cfg;
  cfg.truncation = SkewNormal{};
  return cfg;
}

namespace {

std::string strip(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

}  // namespace

ScenarioConfig read_scenario_config(std::istream& in, ScenarioConfig cfg) {
  std::string line;
  int line_no = 0;
  SkewNormal trunc = cfg.truncation.value_or(SkewNormal{});
  bool truncated = cfg.truncation.has_value();
  while (std::getline(in, line)) {
    ++line_no;
    line = strip(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    auto fail = [&](const std::string& why) {
      throw Error(ErrorKind::InvalidArgument, "config line " + std::to_string(line_no) + ": " + why);
    };
    if (eq == std::string::npos) fail("expected key = value");
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    double x = 0.0;
    try {
      std::size_t used = 0;
      x = std::stod(value, &used);
      if (used != value.size()) fail("bad value '" + value + "'");
    } catch (const std::logic_error&) {
      fail("bad value '" + value + "'");
    }
    if (key == "n") cfg.n = static_cast<int>(x);
    else if (key == "hazard_ill") cfg.hazard_ill = x;
    else if (key == "hazard_direct") cfg.hazard_direct = x;
    else if (key == "progression_factor") cfg.progression_factor = x;
    else if (key == "censor_hazard") cfg.censor_hazard = x;
    else if (key == "truncation") truncated = x != 0.0;
    else if (key == "truncation_location") trunc.location = x;
    else if (key == "truncation_scale") trunc.scale = x;
    else if (key == "truncation_shape") trunc.shape = x;
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(std::stoull(value));
    else if (key == "replications") cfg.replications = static_cast<int>(x);
    else fail("unknown key '" + key + "'");
  }
  cfg.truncation = truncated ? std::optional<SkewNormal>(trunc) : std::nullopt;
  cfg.validate();
  return cfg;
}

double sample_skew_normal(std::mt19937_64& rng, const SkewNormal& dist) {
  std::normal_distribution<double> normal;
  const double delta = dist.shape / std::sqrt(1.0 + dist.shape * dist.shape);
  const double u0 = normal(rng);
  const double u1 = normal(rng);
  return dist.location + dist.scale * (delta * std::abs(u0) + std::sqrt(1.0 - delta * delta) * u1);
}

namespace {

IllnessDeathRecord observe(std::string id, double entry, double t0, bool ill, double t_abs, double c) {
  IllnessDeathRecord r;
  r.id = std::move(id);
  r.entry = entry;
  if (c < t0) {
    r.exit0 = c;
    r.cause0 = FirstExit::Censored;
  } else if (!ill) {
    r.exit0 = t0;
    r.cause0 = FirstExit::ToAbsorbed;
  } else {
    r.exit0 = t0;
    r.cause0 = FirstExit::ToIll;
    r.exit1 = std::min(t_abs, c);
    r.cause1 = t_abs <= c ? SecondExit::ToAbsorbed : SecondExit::Censored;
  }
  return r;
}

}  // namespace

Cohort simulate_cohort(const ScenarioConfig& cfg, std::uint64_t rep_index) {
  auto rng = substream(cfg.seed, rep_index);
  std::exponential_distribution<double> first_exit(cfg.hazard_ill + cfg.hazard_direct);
  std::bernoulli_distribution falls_ill(cfg.hazard_ill / (cfg.hazard_ill + cfg.hazard_direct));
  std::exponential_distribution<double> censoring(cfg.censor_hazard);

  Cohort cohort;
  cohort.reserve(static_cast<std::size_t>(cfg.n));
  for (int i = 0; i < cfg.n; ++i) {
    const double t0 = first_exit(rng);
    const bool ill = falls_ill(rng);
    const double t_abs = ill ? cfg.progression_factor * t0 : t0;
    const double entry = cfg.truncation ? std::max(0.0, sample_skew_normal(rng, *cfg.truncation)) : 0.0;
    const double c = entry + censoring(rng);
    if (entry >= t_abs) continue;
    cohort.push_back(observe(std::to_string(i + 1), entry, t0, ill, t_abs, c));
  }
  if (cohort.empty()) throw Error(ErrorKind::DegenerateCohort, "every subject was truncated out");
  return cohort;
}

double true_p01(const TransitionQuery& q, const ScenarioConfig& cfg) {
  const double lambda = cfg.hazard_ill + cfg.hazard_direct;
  const double p_ill = cfg.hazard_ill / lambda;
  const double lower = std::max(q.s, q.t / cfg.progression_factor);
  return p_ill * (std::exp(-lambda * (lower - q.s)) - std::exp(-lambda * (q.t - q.s)));
}

Cohort simulate_markov_cohort(const MarkovConfig& cfg, std::uint64_t seed, std::uint64_t rep_index) {
  auto rng = substream(seed, rep_index);
  std::exponential_distribution<double> first_exit(cfg.hazard_ill + cfg.hazard_direct);
  std::bernoulli_distribution falls_ill(cfg.hazard_ill / (cfg.hazard_ill + cfg.hazard_direct));
  std::exponential_distribution<double> sojourn1(cfg.hazard_ill_death);
  std::exponential_distribution<double> censoring(cfg.censor_hazard);

  Cohort cohort;
  cohort.reserve(static_cast<std::size_t>(cfg.n));
  for (int i = 0; i < cfg.n; ++i) {
    const double t0 = first_exit(rng);
    const bool ill = falls_ill(rng);
    const double t_abs = ill ? t0 + sojourn1(rng) : t0;
    const double c = censoring(rng);
    cohort.push_back(observe(std::to_string(i + 1), 0.0, t0, ill, t_abs, c));
  }
  return cohort;
}

double markov_true_p01(const TransitionQuery& q, const MarkovConfig& cfg) {
  const double lambda = cfg.hazard_ill + cfg.hazard_direct;
  const double mu = cfg.hazard_ill_death;
  const double h = q.t - q.s;
  if (std::abs(mu - lambda) < 1e-12) return cfg.hazard_ill * h * std::exp(-lambda * h);
  return cfg.hazard_ill * (std::exp(-lambda * h) - std::exp(-mu * h)) / (mu - lambda);
}

const BiasVarianceRow* BiasVarianceTable::find(Method m, double t) const {
  for (const auto& row : rows) {
    if (row.estimator == m && row.t == t) return &row;
  }
  return nullptr;
}

namespace {

struct Replication {
  bool degenerate = false;
  int cohort_size = 0;
  std::vector<double> estimates;  // estimator-major; NaN where the estimator failed
};

Replication run_replication(const ScenarioConfig& cfg, const std::vector<Method>& estimators,
                            const std::vector<double>& eval_times, double s, std::uint64_t rep) {
  Replication out;
  out.estimates.assign(estimators.size() * eval_times.size(), std::numeric_limits<double>::quiet_NaN());
  Cohort cohort;
  try {
    cohort = simulate_cohort(cfg, rep);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::DegenerateCohort) throw;
    out.degenerate = true;
    return out;
  }
  out.cohort_size = static_cast<int>(cohort.size());
  std::size_t cell = 0;
  for (Method m : estimators) {
    for (double t : eval_times) {
      try {
        out.estimates[cell] = run_method(m, cohort, TransitionQuery::make(s, t)).estimate.value;
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::InvalidArgument) throw;
      }
      ++cell;
    }
  }
  return out;
}

// Deterministic fold in replication order.
BiasVarianceTable summarize(const ScenarioConfig& cfg, const std::vector<Method>& estimators,
                            const std::vector<double>& eval_times, double s,
                            const std::vector<Replication>& reps) {
  BiasVarianceTable table;
  table.replications = static_cast<int>(reps.size());
  double size_sum = 0.0;
  for (const auto& r : reps) {
    if (r.degenerate) ++table.degenerate_replications;
    else size_sum += r.cohort_size;
  }
  const int usable = table.replications - table.degenerate_replications;
  if (usable == 0) throw Error(ErrorKind::DegenerateCohort, "every replication degenerated");
  table.mean_cohort_size = size_sum / usable;

  std::size_t cell = 0;
  for (Method m : estimators) {
    for (double t : eval_times) {
      BiasVarianceRow row;
      row.estimator = m;
      row.s = s;
      row.t = t;
      row.truth = true_p01(TransitionQuery{s, t}, cfg);
      double sum = 0.0;
      for (const auto& r : reps) {
        if (r.degenerate) continue;
        const double x = r.estimates[cell];
        if (std::isnan(x)) {
          ++row.n_excluded;
        } else {
          sum += x;
          ++row.n_effective;
        }
      }
      if (row.n_effective > 0) {
        row.mean_estimate = sum / row.n_effective;
        double ss = 0.0;
        for (const auto& r : reps) {
          if (r.degenerate || std::isnan(r.estimates[cell])) continue;
          const double d = r.estimates[cell] - row.mean_estimate;
          ss += d * d;
        }
        row.variance = row.n_effective > 1 ? ss / (row.n_effective - 1) : 0.0;
        row.bias = row.mean_estimate - row.truth;
      } else {
        row.mean_estimate = row.bias = row.variance = std::numeric_limits<double>::quiet_NaN();
      }
      table.rows.push_back(row);
      ++cell;
    }
  }
  return table;
}

void check_plan(const ScenarioConfig& cfg, const std::vector<double>& eval_times, double s) {
  cfg.validate();
  for (double t : eval_times) TransitionQuery::make(s, t);
}

}  // namespace

BiasVarianceTable run_monte_carlo_serial(const ScenarioConfig& cfg, const std::vector<Method>& estimators,
                                         const std::vector<double>& eval_times, double s) {
  check_plan(cfg, eval_times, s);
  std::vector<Replication> reps(static_cast<std::size_t>(cfg.replications));
  for (std::size_t i = 0; i < reps.size(); ++i) reps[i] = run_replication(cfg, estimators, eval_times, s, i);
  return summarize(cfg, estimators, eval_times, s, reps);
}

BiasVarianceTable run_monte_carlo(const ScenarioConfig& cfg, const std::vector<Method>& estimators,
                                  const std::vector<double>& eval_times, double s) {
  check_plan(cfg, eval_times, s);
  const long n = cfg.replications;
  std::vector<Replication> reps(static_cast<std::size_t>(n));
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 8)
  for (long i = 0; i < n; ++i) {
    try {
      reps[static_cast<std::size_t>(i)] =
          run_replication(cfg, estimators, eval_times, s, static_cast<std::uint64_t>(i));
    } catch (...) {
#pragma omp critical(idm_mc_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return summarize(cfg, estimators, eval_times, s, reps);
}

void write_bias_variance_csv(std::ostream& out, const BiasVarianceTable& table) {
  out << "estimator,s,t,bias,variance,n_effective,n_excluded\n";
  for (const auto& row : table.rows) {
    out << to_string(row.estimator) << ',' << format_number(row.s) << ',' << format_number(row.t) << ','
        << format_optional(row.bias) << ',' << format_optional(row.variance) << ',' << row.n_effective << ','
        << row.n_excluded << '\n';
  }
}

}  // namespace idm
