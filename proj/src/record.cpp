#include "idm/record.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "idm/errors.hpp"

namespace idm {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedRecord: return "MalformedRecord";
    case ErrorKind::EmptyRiskSet: return "EmptyRiskSet";
    case ErrorKind::EmptyLandmark: return "EmptyLandmark";
    case ErrorKind::ZeroDenominator: return "ZeroDenominator";
    case ErrorKind::DegenerateWeight: return "DegenerateWeight";
    case ErrorKind::DegenerateCohort: return "DegenerateCohort";
    case ErrorKind::TooManyFailures: return "TooManyFailures";
    case ErrorKind::UnsupportedTruncation: return "UnsupportedTruncation";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

TransitionQuery TransitionQuery::make(double s, double t) {
  if (!std::isfinite(s) || !std::isfinite(t) || s < 0.0 || t < s) {
    throw Error(ErrorKind::InvalidArgument,
                "transition query needs finite 0 <= s <= t (got s=" + std::to_string(s) +
                    ", t=" + std::to_string(t) + ")");
  }
  return {s, t};
}

IllnessDeathRecord validate(IllnessDeathRecord r) {
  auto fail = [&](const std::string& why) { throw MalformedRecord("record '" + r.id + "': " + why); };

  if (!std::isfinite(r.entry) || !std::isfinite(r.exit0)) fail("non-finite time");
  if (r.exit1 && !std::isfinite(*r.exit1)) fail("non-finite time");
  r.entry = std::max(r.entry, 0.0);
  if (r.exit0 < 0.0) fail("negative exit0");

  const bool ill = r.cause0 == FirstExit::ToIll;
  if (ill != r.exit1.has_value() || ill != r.cause1.has_value()) {
    fail("exit1/cause1 must be present exactly when cause0 is ill");
  }
  if (ill) {
    if (*r.exit1 < r.exit0) fail("exit1 < exit0");
    if (r.entry >= *r.exit1) fail("entry >= exit1");
  } else if (r.entry >= r.exit0) {
    fail("entry >= exit0");
  }
  return r;
}

namespace {

double parse_time(const std::string& field, const std::string& text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) throw MalformedRecord("bad number in '" + field + "': '" + text + "'");
  return value;
}

const std::string* field_or_null(const std::map<std::string, std::string>& raw, const std::string& key) {
  auto it = raw.find(key);
  if (it == raw.end() || it->second.empty()) return nullptr;
  return &it->second;
}

}  // namespace

IllnessDeathRecord validate_record(const std::map<std::string, std::string>& raw) {
  IllnessDeathRecord r;
  auto require = [&](const char* key) -> const std::string& {
    const std::string* v = field_or_null(raw, key);
    if (!v) throw MalformedRecord(std::string("missing field '") + key + "'");
    return *v;
  };

  r.id = require("id");
  if (const std::string* e = field_or_null(raw, "entry")) r.entry = parse_time("entry", *e);
  r.exit0 = parse_time("exit0", require("exit0"));

  const std::string& c0 = require("cause0");
  if (c0 == "1") r.cause0 = FirstExit::ToIll;
  else if (c0 == "2") r.cause0 = FirstExit::ToAbsorbed;
  else if (c0 == "0") r.cause0 = FirstExit::Censored;
  else throw MalformedRecord("cause0 must be 0, 1 or 2 (got '" + c0 + "')");

  const std::string* e1 = field_or_null(raw, "exit1");
  const std::string* c1 = field_or_null(raw, "cause1");
  if (e1) r.exit1 = parse_time("exit1", *e1);
  if (c1) {
    if (*c1 == "2") r.cause1 = SecondExit::ToAbsorbed;
    else if (*c1 == "0") r.cause1 = SecondExit::Censored;
    else throw MalformedRecord("cause1 must be 0 or 2 (got '" + *c1 + "')");
  }
  return validate(std::move(r));
}

KappaObservation derive_kappa(const IllnessDeathRecord& r, const TransitionQuery& q) {
  const double time = r.final_time();
  if (r.final_censored()) return {time, KappaKind::Censored};
  return {time, q.indicator(r.exit0, time) ? KappaKind::Event1 : KappaKind::Event2};
}

Cohort landmark_subset(std::span<const IllnessDeathRecord> cohort, double s) {
  Cohort out;
  for (const auto& r : cohort) {
    const bool entered = s == 0.0 ? r.entry == 0.0 : r.entry < s;
    if (entered && r.exit0 > s) out.push_back(r);
  }
  return out;
}

bool is_untruncated(std::span<const IllnessDeathRecord> cohort) {
  return std::all_of(cohort.begin(), cohort.end(), [](const auto& r) { return r.entry == 0.0; });
}

bool is_uncensored(std::span<const IllnessDeathRecord> cohort) {
  return std::none_of(cohort.begin(), cohort.end(), [](const auto& r) { return r.final_censored(); });
}

}  // namespace idm
