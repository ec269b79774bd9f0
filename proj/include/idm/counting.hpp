#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "idm/record.hpp"

namespace idm {

/// Risk sets and counting-process increments at one observed time u.
///
/// Risk sets are left-continuous with delayed entry: a subject is at risk
/// at u when entry < u <= exit. At tied times all event increments are
/// applied before censoring decrements.
struct CountingPoint {
  double time = 0.0;

  // State 0 of the illness-death process (N0, Y0, N0^c).
  int at_risk0 = 0;
  int to_ill = 0;
  int to_absorbed0 = 0;
  int censored0 = 0;

  // State 1, only used by the Markov comparator.
  int at_risk1 = 0;
  int ill_to_absorbed = 0;

  // Competing-risks process kappa for the bound (s,t): N1, N2, N^c, Y.
  int at_risk = 0;
  int events1 = 0;
  int events2 = 0;
  int censored = 0;

  int exits0() const { return to_ill + to_absorbed0; }
  int events() const { return events1 + events2; }
};

struct CountingProcesses {
  TransitionQuery query;
  bool landmark = false;
  int subjects = 0;
  std::vector<CountingPoint> points;  // strictly increasing times

  /// Y(0): the number of subjects observed from the origin.
  int initial_at_risk = 0;
};

/// Aggregates derive_kappa outputs and state transitions of the cohort (or
/// of landmark_subset(cohort, q.s) when `landmark` is set).
/// Throws EmptyRiskSet when there is nobody to aggregate.
CountingProcesses build_counting(std::span<const IllnessDeathRecord> cohort, const TransitionQuery& q,
                                 bool landmark);

/// Right-continuous piecewise-constant function of time.
struct StepFunction {
  std::vector<double> jump_times;
  std::vector<double> values;
  double initial_value = 0.0;

  double operator()(double u) const;
};

/// `time,value` rows, one per jump.
void write_step_function_csv(std::ostream& out, const StepFunction& f);

}  // namespace idm
