#pragma once

// Observation records of a three-state illness-death process without
// recovery (0 = initial, 1 = ill, 2 = absorbed) and the derived
// competing-risks datum used by every product-limit estimator.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace idm {

enum class FirstExit { ToIll, ToAbsorbed, Censored };
enum class SecondExit { ToAbsorbed, Censored };

/// One subject's observed path.
///
/// `entry` is the left-truncation time, `exit0` the observed exit from (or
/// censoring in) state 0. The optional second leg exists iff the subject
/// was observed to fall ill. A subject may also enter the study already in
/// state 1 (exit0 <= entry < exit1); such a record carries no information on
/// state 0 and is only used by the Markov comparator.
struct IllnessDeathRecord {
  std::string id;
  double entry = 0.0;
  double exit0 = 0.0;
  FirstExit cause0 = FirstExit::Censored;
  std::optional<double> exit1;
  std::optional<SecondExit> cause1;

  double final_time() const { return exit1 ? *exit1 : exit0; }
  bool final_censored() const {
    return cause0 == FirstExit::Censored || cause1 == SecondExit::Censored;
  }
  bool entered_in_state0() const { return entry < exit0; }
  bool operator==(const IllnessDeathRecord&) const = default;
};

using Cohort = std::vector<IllnessDeathRecord>;

/// A fixed pair of times with s <= t.
struct TransitionQuery {
  double s = 0.0;
  double t = 0.0;

  /// Throws InvalidArgument unless 0 <= s <= t and both are finite.
  static TransitionQuery make(double s, double t);

  /// 1(s < t0 <= t, t < t_abs)
  bool indicator(double t0, double t_abs) const { return s < t0 && t0 <= t && t < t_abs; }
};

enum class KappaKind { Event1, Event2, Censored };

struct KappaObservation {
  double time = 0.0;
  KappaKind kind = KappaKind::Censored;
  bool operator==(const KappaObservation&) const = default;
};

/// Checks the record invariants and returns the record unchanged, or throws
/// MalformedRecord. Negative entry times are clamped to 0 first.
IllnessDeathRecord validate(IllnessDeathRecord r);

/// Builds a record from CSV-schema fields (`id,entry,exit0,cause0,exit1,cause1`;
/// cause0 in {1,2,0}, cause1 in {2,0}). Missing `entry` defaults to 0.
IllnessDeathRecord validate_record(const std::map<std::string, std::string>& raw);

KappaObservation derive_kappa(const IllnessDeathRecord& r, const TransitionQuery& q);

/// Subjects already entered, still in state 0 and uncensored at s:
/// entry < s and exit0 > s. At s = 0 the entry condition becomes entry == 0.
Cohort landmark_subset(std::span<const IllnessDeathRecord> cohort, double s);

bool is_untruncated(std::span<const IllnessDeathRecord> cohort);
bool is_uncensored(std::span<const IllnessDeathRecord> cohort);

}  // namespace idm
