#include "idm/counting.hpp"

#include <algorithm>
#include <ostream>

#include "idm/errors.hpp"
#include "idm/report.hpp"

namespace idm {

namespace {

// #{x in sorted : x < u}
int count_below(const std::vector<double>& sorted, double u) {
  return static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), u) - sorted.begin());
}

}  // namespace

CountingProcesses build_counting(std::span<const IllnessDeathRecord> cohort, const TransitionQuery& q,
                                 bool landmark) {
  Cohort subset;
  if (landmark) {
    subset = landmark_subset(cohort, q.s);
    cohort = subset;
  }
  if (cohort.empty()) {
    throw Error(ErrorKind::EmptyRiskSet, landmark ? "landmark subset is empty" : "cohort is empty");
  }

  CountingProcesses cp;
  cp.query = q;
  cp.landmark = landmark;
  cp.subjects = static_cast<int>(cohort.size());

  std::vector<double> times;
  times.reserve(cohort.size() * 2);
  // Entry and exit times for the three risk sets; every interval is nonempty
  // because validation enforces entry < exit.
  std::vector<double> entry_all, exit_all, entry0, exit0, entry1, exit1;
  for (const auto& r : cohort) {
    times.push_back(r.exit0);
    if (r.exit1) times.push_back(*r.exit1);
    entry_all.push_back(r.entry);
    exit_all.push_back(r.final_time());
    if (r.entered_in_state0()) {
      entry0.push_back(r.entry);
      exit0.push_back(r.exit0);
    }
    if (r.exit1) {
      entry1.push_back(std::max(r.entry, r.exit0));
      exit1.push_back(*r.exit1);
    }
    if (r.entry == 0.0) ++cp.initial_at_risk;
  }
  for (auto* v : {&times, &entry_all, &exit_all, &entry0, &exit0, &entry1, &exit1}) {
    std::sort(v->begin(), v->end());
  }
  times.erase(std::unique(times.begin(), times.end()), times.end());

  cp.points.resize(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double u = times[i];
    auto& p = cp.points[i];
    p.time = u;
    p.at_risk = count_below(entry_all, u) - count_below(exit_all, u);
    p.at_risk0 = count_below(entry0, u) - count_below(exit0, u);
    p.at_risk1 = count_below(entry1, u) - count_below(exit1, u);
  }

  auto point_at = [&](double u) -> CountingPoint& {
    return cp.points[std::lower_bound(times.begin(), times.end(), u) - times.begin()];
  };
  for (const auto& r : cohort) {
    if (r.entered_in_state0()) {
      auto& p0 = point_at(r.exit0);
      switch (r.cause0) {
        case FirstExit::ToIll: ++p0.to_ill; break;
        case FirstExit::ToAbsorbed: ++p0.to_absorbed0; break;
        case FirstExit::Censored: ++p0.censored0; break;
      }
    }
    if (r.cause1 == SecondExit::ToAbsorbed && std::max(r.entry, r.exit0) < *r.exit1) {
      ++point_at(*r.exit1).ill_to_absorbed;
    }
    const KappaObservation k = derive_kappa(r, q);
    auto& pk = point_at(k.time);
    switch (k.kind) {
      case KappaKind::Event1: ++pk.events1; break;
      case KappaKind::Event2: ++pk.events2; break;
      case KappaKind::Censored: ++pk.censored; break;
    }
  }
  return cp;
}

double StepFunction::operator()(double u) const {
  const auto it = std::upper_bound(jump_times.begin(), jump_times.end(), u);
  if (it == jump_times.begin()) return initial_value;
  return values[static_cast<std::size_t>(it - jump_times.begin()) - 1];
}

void write_step_function_csv(std::ostream& out, const StepFunction& f) {
  out << "time,value\n";
  for (std::size_t i = 0; i < f.jump_times.size(); ++i) {
    out << format_number(f.jump_times[i]) << ',' << format_number(f.values[i]) << '\n';
  }
}

}  // namespace idm
