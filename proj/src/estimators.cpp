#include "idm/estimators.hpp"

#include <algorithm>

#include "idm/errors.hpp"
#include "idm/product_limit.hpp"

namespace idm {

namespace {

void require_untruncated(std::span<const IllnessDeathRecord> cohort, const char* who) {
  if (!is_untruncated(cohort)) {
    throw Error(ErrorKind::UnsupportedTruncation, std::string(who) + " needs a cohort observed from time 0");
  }
}

bool last_observation_censored(const CountingProcesses& cp) {
  for (auto it = cp.points.rbegin(); it != cp.points.rend(); ++it) {
    if (it->events() + it->censored > 0) return it->censored > 0;
  }
  return false;
}

CountingProcesses landmark_counting(std::span<const IllnessDeathRecord> cohort, const TransitionQuery& q) {
  try {
    return build_counting(cohort, q, true);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::EmptyRiskSet) throw;
    throw Error(ErrorKind::EmptyLandmark, "nobody entered, in state 0 and uncensored at s");
  }
}

double km_denominator(const CountingProcesses& cp, double s) {
  const double km = kaplan_meier(cp, s);
  if (km == 0.0) throw Error(ErrorKind::ZeroDenominator, "Kaplan-Meier estimate of P(T0 > s) is 0");
  return km;
}

}  // namespace

double kaplan_meier(const CountingProcesses& cp, double horizon) {
  return kernels::state0_survival<double>(cp.points, horizon);
}

Estimate cif_limit(const CountingProcesses& cp) {
  Estimate e;
  e.value = kernels::cif_limit<double>(cp.points);
  e.diagnostics.support_warning = last_observation_censored(cp);
  return e;
}

Estimate p01_mm(std::span<const IllnessDeathRecord> cohort, const TransitionQuery& q) {
  require_untruncated(cohort, "p01_mm");
  const auto cp = build_counting(cohort, q, false);
  Estimate e = cif_limit(cp);
  e.value /= km_denominator(cp, q.s);
  e.diagnostics.exceeds_one = e.value > 1.0;
  return e;
}

Estimate p01_mm_stute(std::span<const IllnessDeathRecord> cohort, const TransitionQuery& q) {
  require_untruncated(cohort, "p01_mm_stute");
  const auto cp = build_counting(cohort, q, false);
  Estimate e;
  e.value = kernels::stute_numerator<double>(cohort, q) / km_denominator(cp, q.s);
  e.diagnostics.support_warning = last_observation_censored(cp);
  e.diagnostics.exceeds_one = e.value > 1.0;
  return e;
}

double ipcw_numerator(std::span<const IllnessDeathRecord> cohort, const TransitionQuery& q) {
  require_untruncated(cohort, "ipcw_numerator");
  const auto cp = build_counting(cohort, q, false);
  return kernels::ipcw_numerator<double>(cp.points, cp.initial_at_risk);
}

double tsai_crowley_weight(std::span<const IllnessDeathRecord> cohort, const TransitionQuery& q, double u) {
  const auto full = build_counting(cohort, q, false);
  const auto subset = build_counting(cohort, q, true);
  return kernels::state0_censoring_survival<double>(full.points, q.s) *
         kernels::censoring_survival_before<double>(subset.points, u, q.s);
}

double tsai_crowley_numerator(std::span<const IllnessDeathRecord> cohort, const TransitionQuery& q) {
  require_untruncated(cohort, "tsai_crowley_numerator");
  const auto full = build_counting(cohort, q, false);
  const auto subset = landmark_counting(cohort, q);
  const double first = kernels::state0_censoring_survival<double>(full.points, q.s);
  double total = 0.0;
  for (const auto& p : subset.points) {
    if (p.events1 == 0) continue;
    const double weight = first * kernels::censoring_survival_before<double>(subset.points, p.time, q.s);
    if (weight == 0.0) throw Error(ErrorKind::DegenerateWeight, "Tsai-Crowley weight hit zero");
    total += p.events1 / weight;
  }
  return total / full.initial_at_risk;
}

Estimate p01_check(std::span<const IllnessDeathRecord> cohort, const TransitionQuery& q) {
  const auto cp = landmark_counting(cohort, q);
  Estimate e = cif_limit(cp);

  // sY is non-increasing after s, so the minimum over (s,t] is sY(t).
  double ratio = 1.0;
  if (q.t > q.s) {
    const auto it = std::lower_bound(cp.points.begin(), cp.points.end(), q.t,
                                     [](const CountingPoint& p, double u) { return p.time < u; });
    const int at_t = it == cp.points.end() ? 0 : it->at_risk;
    ratio = static_cast<double>(at_t) / cp.subjects;
  }
  e.diagnostics.min_risk_ratio = ratio;
  return e;
}

double var_check(std::span<const IllnessDeathRecord> cohort, const TransitionQuery& q) {
  const auto cp = landmark_counting(cohort, q);
  return kernels::landmark_cif_variance<double>(cp.points);
}

double p01_aalen_johansen(std::span<const IllnessDeathRecord> cohort, const TransitionQuery& q) {
  const bool any_in_state0 = std::any_of(cohort.begin(), cohort.end(), [&](const auto& r) {
    return r.entered_in_state0() && r.entry <= q.s && r.exit0 > q.s;
  });
  if (!any_in_state0) throw Error(ErrorKind::EmptyRiskSet, "state 0 risk set is empty just after s");
  const auto cp = build_counting(cohort, q, false);
  return kernels::aalen_johansen_p01<double>(cp.points, q.s, q.t);
}

double multinomial_uncensored(std::span<const IllnessDeathRecord> cohort, const TransitionQuery& q) {
  if (!is_uncensored(cohort) || !is_untruncated(cohort)) {
    throw Error(ErrorKind::InvalidArgument, "multinomial estimator needs complete, untruncated data");
  }
  return kernels::multinomial_p01<double>(cohort, q);
}

Cohort artificial_censoring(std::span<const IllnessDeathRecord> cohort, double tau) {
  if (!(tau > 0.0)) throw Error(ErrorKind::InvalidArgument, "tau must be positive");
  Cohort out;
  out.reserve(cohort.size());
  for (IllnessDeathRecord r : cohort) {
    if (r.entry >= tau) continue;
    if (r.exit0 >= tau) {
      r.exit0 = tau;
      r.cause0 = FirstExit::ToAbsorbed;
      r.exit1.reset();
      r.cause1.reset();
    } else if (r.exit1 && *r.exit1 >= tau) {
      r.exit1 = tau;
      r.cause1 = SecondExit::ToAbsorbed;
    }
    out.push_back(std::move(r));
  }
  return out;
}

StepFunction state0_survival_curve(const CountingProcesses& cp) {
  StepFunction f;
  f.initial_value = 1.0;
  double surv = 1.0;
  for (const auto& p : cp.points) {
    if (p.exits0() == 0) continue;
    surv *= 1.0 - kernels::ratio<double>(p.exits0(), p.at_risk0);
    f.jump_times.push_back(p.time);
    f.values.push_back(surv);
  }
  return f;
}

StepFunction cif_curve(const CountingProcesses& cp) {
  StepFunction f;
  double surv = 1.0;
  double total = 0.0;
  for (const auto& p : cp.points) {
    if (p.events1 > 0) {
      total += surv * kernels::ratio<double>(p.events1, p.at_risk);
      f.jump_times.push_back(p.time);
      f.values.push_back(total);
    }
    if (p.events() > 0) surv *= 1.0 - kernels::ratio<double>(p.events(), p.at_risk);
  }
  return f;
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::Check: return "check";
    case Method::MM: return "mm";
    case Method::MMStute: return "mm-stute";
    case Method::AalenJohansen: return "aj";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view name) {
  for (Method m : {Method::Check, Method::MM, Method::MMStute, Method::AalenJohansen}) {
    if (name == to_string(m)) return m;
  }
  return std::nullopt;
}

MethodResult run_method(Method m, std::span<const IllnessDeathRecord> cohort, const TransitionQuery& q,
                        bool with_variance) {
  MethodResult out;
  switch (m) {
    case Method::Check:
      out.estimate = p01_check(cohort, q);
      if (with_variance) out.variance = var_check(cohort, q);
      break;
    case Method::MM: out.estimate = p01_mm(cohort, q); break;
    case Method::MMStute: out.estimate = p01_mm_stute(cohort, q); break;
    case Method::AalenJohansen: out.estimate.value = p01_aalen_johansen(cohort, q); break;
  }
  return out;
}

}  // namespace idm
