#pragma once

// Random small cohorts on a coarse time grid, so tied times are common.

#include <random>
#include <string>

#include "idm/record.hpp"

namespace idm::testing {

struct RandomCohortOptions {
  int min_size = 1;
  int max_size = 50;
  bool censoring = true;
  bool truncation = false;
};

inline Cohort random_cohort(std::mt19937_64& rng, const RandomCohortOptions& opt = {}) {
  std::uniform_int_distribution<int> size(opt.min_size, opt.max_size);
  std::uniform_int_distribution<int> tick(1, 24);
  std::uniform_int_distribution<int> entry_tick(0, 6);
  std::bernoulli_distribution coin(0.5);
  std::bernoulli_distribution censor(opt.censoring ? 0.3 : 0.0);

  Cohort cohort;
  const int n = size(rng);
  for (int i = 0; i < n; ++i) {
    IllnessDeathRecord r;
    r.id = "s" + std::to_string(i);
    r.entry = opt.truncation ? 0.5 * entry_tick(rng) : 0.0;
    r.exit0 = r.entry + 0.5 * tick(rng);
    if (censor(rng)) {
      r.cause0 = FirstExit::Censored;
    } else if (coin(rng)) {
      r.cause0 = FirstExit::ToIll;
      r.exit1 = r.exit0 + 0.5 * (tick(rng) - 1);
      r.cause1 = censor(rng) ? SecondExit::Censored : SecondExit::ToAbsorbed;
    } else {
      r.cause0 = FirstExit::ToAbsorbed;
    }
    cohort.push_back(validate(r));
  }
  return cohort;
}

/// A landmark pair on the same grid.
inline TransitionQuery random_query(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> tick(0, 20);
  const double s = 0.5 * tick(rng);
  const double t = s + 0.5 * tick(rng);
  return TransitionQuery::make(s, t);
}

}  // namespace idm::testing
