#include "idm/inference.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <ostream>

#include <boost/math/distributions/normal.hpp>

#include "idm/errors.hpp"
#include "idm/report.hpp"
#include "idm/rng.hpp"

namespace idm {

double empirical_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw Error(ErrorKind::InvalidArgument, "quantile of an empty sample");
  const double m = static_cast<double>(sorted.size());
  // m * p is computed in floating point; nudge so e.g. 0.975 * 400 stays 390.
  const double k = std::ceil(m * p - 1e-9);
  const auto idx = static_cast<std::size_t>(std::clamp(k, 1.0, m)) - 1;
  return sorted[idx];
}

namespace {

double resample_estimate(std::span<const IllnessDeathRecord> cohort, const CohortStatistic& statistic,
                         std::uint64_t seed, std::uint64_t b) {
  auto rng = substream(seed, b);
  std::uniform_int_distribution<std::size_t> pick(0, cohort.size() - 1);
  Cohort sample;
  sample.reserve(cohort.size());
  for (std::size_t i = 0; i < cohort.size(); ++i) sample.push_back(cohort[pick(rng)]);
  try {
    return statistic(sample);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidArgument) throw;
    return std::numeric_limits<double>::quiet_NaN();
  }
}

void check_args(std::span<const IllnessDeathRecord> cohort, int n_boot, double level) {
  if (cohort.empty()) throw Error(ErrorKind::EmptyRiskSet, "cannot bootstrap an empty cohort");
  if (n_boot < 1) throw Error(ErrorKind::InvalidArgument, "n_boot must be >= 1");
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorKind::InvalidArgument, "level must lie in (0,1)");
}

CiResult summarize(double point, const std::vector<double>& draws, double level) {
  CiResult ci;
  ci.point = point;
  ci.n_boot = static_cast<int>(draws.size());
  std::vector<double> ok;
  ok.reserve(draws.size());
  for (double x : draws) {
    if (std::isnan(x)) ++ci.n_failed;
    else ok.push_back(x);
  }
  if (2 * ci.n_failed > ci.n_boot) {
    throw Error(ErrorKind::TooManyFailures,
                std::to_string(ci.n_failed) + " of " + std::to_string(ci.n_boot) + " resamples failed");
  }

  double mean = 0.0;
  for (double x : ok) mean += x;
  mean /= static_cast<double>(ok.size());
  double ss = 0.0;
  for (double x : ok) ss += (x - mean) * (x - mean);
  ci.boot_variance = ok.size() > 1 ? ss / static_cast<double>(ok.size() - 1) : 0.0;

  const double alpha = 1.0 - level;
  std::sort(ok.begin(), ok.end());
  auto clip = [](double x) { return std::clamp(x, 0.0, 1.0); };
  ci.quantile_ci = {clip(empirical_quantile(ok, alpha / 2)), clip(empirical_quantile(ok, 1.0 - alpha / 2))};
  const double z = boost::math::quantile(boost::math::normal(), 1.0 - alpha / 2);
  const double half = z * std::sqrt(ci.boot_variance);
  ci.normal_ci = {clip(point - half), clip(point + half)};
  return ci;
}

}  // namespace

CiResult bootstrap_statistic_serial(std::span<const IllnessDeathRecord> cohort,
                                    const CohortStatistic& statistic, int n_boot, double level,
                                    std::uint64_t seed) {
  check_args(cohort, n_boot, level);
  const double point = statistic(cohort);
  std::vector<double> draws(static_cast<std::size_t>(n_boot));
  for (std::size_t b = 0; b < draws.size(); ++b) draws[b] = resample_estimate(cohort, statistic, seed, b);
  return summarize(point, draws, level);
}

CiResult bootstrap_statistic(std::span<const IllnessDeathRecord> cohort, const CohortStatistic& statistic,
                             int n_boot, double level, std::uint64_t seed) {
  check_args(cohort, n_boot, level);
  const double point = statistic(cohort);
  std::vector<double> draws(static_cast<std::size_t>(n_boot));
  std::exception_ptr failure;
#pragma omp parallel for schedule(static)
  for (long b = 0; b < static_cast<long>(n_boot); ++b) {
    try {
      draws[static_cast<std::size_t>(b)] = resample_estimate(cohort, statistic, seed, static_cast<std::uint64_t>(b));
    } catch (...) {
#pragma omp critical(idm_boot_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return summarize(point, draws, level);
}

namespace {

CohortStatistic method_statistic(Method method, const TransitionQuery& q) {
  return [method, q](std::span<const IllnessDeathRecord> sample) {
    return run_method(method, sample, q).estimate.value;
  };
}

}  // namespace

CiResult bootstrap_ci(std::span<const IllnessDeathRecord> cohort, const TransitionQuery& q, Method method,
                      int n_boot, double level, std::uint64_t seed) {
  return bootstrap_statistic(cohort, method_statistic(method, q), n_boot, level, seed);
}

CiResult bootstrap_ci_serial(std::span<const IllnessDeathRecord> cohort, const TransitionQuery& q,
                             Method method, int n_boot, double level, std::uint64_t seed) {
  return bootstrap_statistic_serial(cohort, method_statistic(method, q), n_boot, level, seed);
}

void write_ci_csv_header(std::ostream& out) {
  out << "method,s,t,estimate,boot_variance,q_lo,q_hi,n_lo,n_hi,n_boot,n_failed";
}

void write_ci_csv_row(std::ostream& out, Method method, const TransitionQuery& q, const CiResult& ci) {
  out << to_string(method) << ',' << format_number(q.s) << ',' << format_number(q.t) << ','
      << format_number(ci.point) << ',' << format_number(ci.boot_variance) << ','
      << format_number(ci.quantile_ci.first) << ',' << format_number(ci.quantile_ci.second) << ','
      << format_number(ci.normal_ci.first) << ',' << format_number(ci.normal_ci.second) << ',' << ci.n_boot
      << ',' << ci.n_failed;
}

}  // namespace idm
