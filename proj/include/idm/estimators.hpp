#pragma once

// Estimators of the transition probability P01(s,t) = P(X_t = 1 | X_s = 0)
// in an illness-death model without recovery, plus their building blocks.
//
//  * p01_mm         Kaplan-Meier ratio: CIF limit of kappa over P(T0 > s).
//  * p01_mm_stute   same quantity through Stute's Kaplan-Meier integral.
//  * p01_check      CIF limit of kappa inside the landmark subset at s;
//                   handles left truncation.
//  * p01_aalen_johansen  Markov comparator.
//
// The full-cohort estimators (mm, mm-stute, ipcw) need untruncated data and
// throw UnsupportedTruncation otherwise.

#include <optional>
#include <span>
#include <string_view>

#include "idm/counting.hpp"
#include "idm/record.hpp"

namespace idm {

struct Diagnostics {
  /// The largest observation of the analysed kappa sample is censored, so
  /// the CIF limit misses mass beyond the censoring support.
  bool support_warning = false;
  /// p01_mm above 1 (returned unclipped).
  bool exceeds_one = false;
  /// min over (s,t] of sY(v)/sY(s+); reported by p01_check.
  std::optional<double> min_risk_ratio;
};

struct Estimate {
  double value = 0.0;
  Diagnostics diagnostics;
};

/// prod_{v <= horizon} (1 - dN0(v)/Y0(v))
double kaplan_meier(const CountingProcesses& cp, double horizon);

/// Right-hand limit of the Aalen-Johansen CIF for kappa event type 1.
Estimate cif_limit(const CountingProcesses& cp);

Estimate p01_mm(std::span<const IllnessDeathRecord> cohort, const TransitionQuery& q);
Estimate p01_mm_stute(std::span<const IllnessDeathRecord> cohort, const TransitionQuery& q);

/// Inverse-probability-of-censoring-weighted form of the CIF limit; equals
/// cif_limit on untruncated data.
double ipcw_numerator(std::span<const IllnessDeathRecord> cohort, const TransitionQuery& q);

/// Censoring survival split at the landmark: state-0 censoring
/// Kaplan-Meier over [0,s] times the landmark-subset censoring
/// Kaplan-Meier over (s,u).
double tsai_crowley_weight(std::span<const IllnessDeathRecord> cohort, const TransitionQuery& q, double u);

/// (1/Y(0)) int TC(u)^{-1} dN1(u) with the Tsai-Crowley weight; estimates
/// P(s < T0 <= t, t < T) and equals kaplan_meier(s) * p01_check.
double tsai_crowley_numerator(std::span<const IllnessDeathRecord> cohort, const TransitionQuery& q);

Estimate p01_check(std::span<const IllnessDeathRecord> cohort, const TransitionQuery& q);
double var_check(std::span<const IllnessDeathRecord> cohort, const TransitionQuery& q);

double p01_aalen_johansen(std::span<const IllnessDeathRecord> cohort, const TransitionQuery& q);

/// Ratio of crude counts; the ground truth on complete data.
double multinomial_uncensored(std::span<const IllnessDeathRecord> cohort, const TransitionQuery& q);

/// Replaces (T0, T) by (min(T0, tau), min(T, tau)); a time clipped at tau
/// becomes an observed absorption at tau. Subjects entering at or after tau
/// carry no information on [0, tau) and are dropped.
Cohort artificial_censoring(std::span<const IllnessDeathRecord> cohort, double tau);

/// Kaplan-Meier curve of P(T0 > u).
StepFunction state0_survival_curve(const CountingProcesses& cp);
/// Partial CIF integral of kappa event type 1 as a function of its upper limit.
StepFunction cif_curve(const CountingProcesses& cp);

enum class Method { Check, MM, MMStute, AalenJohansen };

std::string_view to_string(Method m);
/// Accepts check, mm, mm-stute, aj.
std::optional<Method> parse_method(std::string_view name);

struct MethodResult {
  Estimate estimate;
  std::optional<double> variance;  // only for Check
};

MethodResult run_method(Method m, std::span<const IllnessDeathRecord> cohort, const TransitionQuery& q,
                        bool with_variance = false);

}  // namespace idm
