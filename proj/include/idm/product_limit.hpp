#pragma once

// Product-limit kernels over counting-process points. All of them are
// exact finite products/sums over observed times and are templated on the
// scalar so the algebraic identities can be checked in rational arithmetic.
// A hazard increment with an empty risk set contributes nothing (0/0 = 0).

#include <algorithm>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "idm/counting.hpp"
#include "idm/errors.hpp"

namespace idm::kernels {

template <class Real>
Real ratio(int num, int den) {
  return den == 0 ? Real(0) : Real(num) / Real(den);
}

/// prod_{v <= horizon} (1 - dN0(v) / Y0(v))
template <class Real>
Real state0_survival(std::span<const CountingPoint> pts, double horizon) {
  Real surv(1);
  for (const auto& p : pts) {
    if (p.time > horizon) break;
    if (p.exits0() > 0) surv *= Real(1) - ratio<Real>(p.exits0(), p.at_risk0);
  }
  return surv;
}

/// int prod_{v<u} (1 - dN(v)/Y(v)) dN1(u)/Y(u) over every point, i.e. the
/// limit of the Aalen-Johansen cumulative incidence of kappa event type 1.
template <class Real>
Real cif_limit(std::span<const CountingPoint> pts) {
  Real surv(1);
  Real total(0);
  for (const auto& p : pts) {
    if (p.events1 > 0) total += surv * ratio<Real>(p.events1, p.at_risk);
    if (p.events() > 0) surv *= Real(1) - ratio<Real>(p.events(), p.at_risk);
  }
  return total;
}

/// prod_{v<u} (1 - dN(v)/Y(v)), the kappa event-free survival just before u.
template <class Real>
Real event_survival_before(std::span<const CountingPoint> pts, double u) {
  Real surv(1);
  for (const auto& p : pts) {
    if (p.time >= u) break;
    if (p.events() > 0) surv *= Real(1) - ratio<Real>(p.events(), p.at_risk);
  }
  return surv;
}

/// prod_{lower < v < u} (1 - dN^c(v) / (Y(v) - dN(v))), the censoring
/// survival just before u based on the censored observations of T.
template <class Real>
Real censoring_survival_before(std::span<const CountingPoint> pts, double u,
                               double lower = -std::numeric_limits<double>::infinity()) {
  Real surv(1);
  for (const auto& p : pts) {
    if (p.time >= u) break;
    if (p.time > lower && p.censored > 0) surv *= Real(1) - ratio<Real>(p.censored, p.at_risk - p.events());
  }
  return surv;
}

/// prod_{v <= s} (1 - dN0^c(v) / (Y0(v) - dN0(v))), censorings in state 0.
template <class Real>
Real state0_censoring_survival(std::span<const CountingPoint> pts, double s) {
  Real surv(1);
  for (const auto& p : pts) {
    if (p.time > s) break;
    if (p.censored0 > 0) surv *= Real(1) - ratio<Real>(p.censored0, p.at_risk0 - p.exits0());
  }
  return surv;
}

/// (1/Y(0)) int G(u-)^{-1} dN1(u) with G the censoring survival above.
template <class Real>
Real ipcw_numerator(std::span<const CountingPoint> pts, int initial_at_risk) {
  Real weight(1);
  Real total(0);
  for (const auto& p : pts) {
    if (p.events1 > 0) {
      if (weight == Real(0)) throw Error(ErrorKind::DegenerateWeight, "censoring survival hit zero");
      total += Real(p.events1) / weight;
    }
    if (p.censored > 0) weight *= Real(1) - ratio<Real>(p.censored, p.at_risk - p.events());
  }
  return total / Real(initial_at_risk);
}

/// Plug-in variance of the landmark cumulative-incidence limit. With
/// S(u) = prod_{(s,u]} (1 - dN/Y) and R(u) the remaining incidence
/// int_{r>u} prod_{(u,r)} (1 - dN/Y) dN1(r)/Y(r):
///   sum_u S(u)^2 (1 - R(u))^2 dN1(u)/Y(u) + S(u)^2 R(u)^2 dN2(u)/Y(u).
template <class Real>
Real landmark_cif_variance(std::span<const CountingPoint> pts) {
  const std::size_t n = pts.size();
  std::vector<Real> remaining(n, Real(0));
  for (std::size_t i = n; i-- > 1;) {
    const auto& next = pts[i];
    remaining[i - 1] = ratio<Real>(next.events1, next.at_risk) +
                       (Real(1) - ratio<Real>(next.events(), next.at_risk)) * remaining[i];
  }
  Real surv(1);
  Real var(0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = pts[i];
    if (p.events() == 0) continue;
    surv *= Real(1) - ratio<Real>(p.events(), p.at_risk);
    const Real sq = surv * surv;
    const Real miss = Real(1) - remaining[i];
    var += sq * miss * miss * ratio<Real>(p.events1, p.at_risk);
    var += sq * remaining[i] * remaining[i] * ratio<Real>(p.events2, p.at_risk);
  }
  return var;
}

/// Markov product integral over (s, t] started from state 0; returns the
/// state-1 occupation probability.
template <class Real>
Real aalen_johansen_p01(std::span<const CountingPoint> pts, double s, double t) {
  Real p0(1);
  Real p1(0);
  for (const auto& p : pts) {
    if (p.time <= s) continue;
    if (p.time > t) break;
    const Real a01 = ratio<Real>(p.to_ill, p.at_risk0);
    const Real a02 = ratio<Real>(p.to_absorbed0, p.at_risk0);
    const Real a12 = ratio<Real>(p.ill_to_absorbed, p.at_risk1);
    p1 = p1 * (Real(1) - a12) + p0 * a01;
    p0 = p0 * (Real(1) - a01 - a02);
  }
  return p1;
}

/// Kaplan-Meier integral of 1(s < T0 <= t, t < T) in Stute's form:
///   sum_i prod_{j<i} (1 - xi_[j]/(n-j+1)) * xi_[i]/(n-i+1) * phi(T0_[i], T_(i))
/// over the subjects ordered by observed absorption time. Tied times put
/// observed absorptions before censorings, then order by id.
template <class Real>
Real stute_numerator(std::span<const IllnessDeathRecord> cohort, const TransitionQuery& q) {
  std::vector<std::size_t> order(cohort.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ra = cohort[a];
    const auto& rb = cohort[b];
    if (ra.final_time() != rb.final_time()) return ra.final_time() < rb.final_time();
    if (ra.final_censored() != rb.final_censored()) return !ra.final_censored();
    return ra.id < rb.id;
  });

  const int n = static_cast<int>(cohort.size());
  Real prefix(1);
  Real total(0);
  for (int i = 1; i <= n; ++i) {
    const auto& r = cohort[order[static_cast<std::size_t>(i - 1)]];
    const int observed = r.final_censored() ? 0 : 1;
    if (observed && q.indicator(r.exit0, r.final_time())) total += prefix * Real(1) / Real(n - i + 1);
    prefix *= Real(1) - Real(observed) / Real(n - i + 1);
  }
  return total;
}

/// #{X_s = 0, X_t = 1} / #{X_s = 0} on complete data.
template <class Real>
Real multinomial_p01(std::span<const IllnessDeathRecord> cohort, const TransitionQuery& q) {
  int in_state0 = 0;
  int ill_at_t = 0;
  for (const auto& r : cohort) {
    if (r.exit0 <= q.s) continue;
    ++in_state0;
    if (r.cause0 == FirstExit::ToIll && q.indicator(r.exit0, r.final_time())) ++ill_at_t;
  }
  if (in_state0 == 0) throw Error(ErrorKind::ZeroDenominator, "nobody in state 0 at s");
  return Real(ill_at_t) / Real(in_state0);
}

}  // namespace idm::kernels
