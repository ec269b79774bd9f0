#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "idm/estimators.hpp"

namespace idm {

struct CiResult {
  double point = 0.0;
  double boot_variance = 0.0;
  std::pair<double, double> quantile_ci{0.0, 0.0};
  std::pair<double, double> normal_ci{0.0, 0.0};
  int n_boot = 0;
  int n_failed = 0;
};

/// Inverse of the empirical CDF (type-1 quantile) of an ascending sample:
/// the smallest x_(k) with k/m >= p.
double empirical_quantile(std::span<const double> sorted, double p);

/// Subject-level nonparametric bootstrap. Resample b draws from substream
/// (seed, b); resamples on which the estimator fails are counted and
/// skipped. Both intervals are clipped to [0, 1] after construction.
/// Throws TooManyFailures when more than half of the resamples fail.
CiResult bootstrap_ci(std::span<const IllnessDeathRecord> cohort, const TransitionQuery& q, Method method,
                      int n_boot, double level, std::uint64_t seed);
CiResult bootstrap_ci_serial(std::span<const IllnessDeathRecord> cohort, const TransitionQuery& q,
                             Method method, int n_boot, double level, std::uint64_t seed);

/// Same resampling scheme around an arbitrary pure statistic. The
/// statistic signals a failed resample by throwing idm::Error.
using CohortStatistic = std::function<double(std::span<const IllnessDeathRecord>)>;
CiResult bootstrap_statistic(std::span<const IllnessDeathRecord> cohort, const CohortStatistic& statistic,
                             int n_boot, double level, std::uint64_t seed);
CiResult bootstrap_statistic_serial(std::span<const IllnessDeathRecord> cohort,
                                    const CohortStatistic& statistic, int n_boot, double level,
                                    std::uint64_t seed);

/// `method,s,t,estimate,boot_variance,q_lo,q_hi,n_lo,n_hi,n_boot,n_failed`
void write_ci_csv_header(std::ostream& out);
void write_ci_csv_row(std::ostream& out, Method method, const TransitionQuery& q, const CiResult& ci);

}  // namespace idm
