#pragma once

// Small hand-checkable cohorts shared by the unit and acceptance suites.
// Frozen values for them come from tests/oracle/hand_fixtures.py.

#include <optional>
#include <string>

#include "idm/record.hpp"

namespace idm::testing {

inline IllnessDeathRecord direct(std::string id, double exit0, double entry = 0.0) {
  return validate({std::move(id), entry, exit0, FirstExit::ToAbsorbed, std::nullopt, std::nullopt});
}

inline IllnessDeathRecord via_illness(std::string id, double exit0, double exit1, double entry = 0.0) {
  return validate({std::move(id), entry, exit0, FirstExit::ToIll, exit1, SecondExit::ToAbsorbed});
}

inline IllnessDeathRecord censored_ill(std::string id, double exit0, double exit1, double entry = 0.0) {
  return validate({std::move(id), entry, exit0, FirstExit::ToIll, exit1, SecondExit::Censored});
}

inline IllnessDeathRecord censored0(std::string id, double exit0, double entry = 0.0) {
  return validate({std::move(id), entry, exit0, FirstExit::Censored, std::nullopt, std::nullopt});
}

/// {T0=1 ill T=4; T0=T=2; T0=3 ill T=6}
inline Cohort uncensored3() {
  return {via_illness("A", 1, 4), direct("B", 2), via_illness("C", 3, 6)};
}

/// uncensored3 plus a subject censored in state 0 at 2.5
inline Cohort censored4() {
  Cohort c = uncensored3();
  c.push_back(censored0("D", 2.5));
  return c;
}

inline const TransitionQuery kFixtureQuery{1.5, 3.5};

}  // namespace idm::testing
