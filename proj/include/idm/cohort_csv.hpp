#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "idm/record.hpp"

namespace idm {

/// Reads a cohort in the `id,entry,exit0,cause0,exit1,cause1` schema.
/// The header is required; column order is free and `entry` is optional.
/// Throws MalformedRecord carrying the 1-based line number.
Cohort read_cohort_csv(std::istream& in);
Cohort read_cohort_csv_file(const std::string& path);

void write_cohort_csv(std::ostream& out, std::span<const IllnessDeathRecord> cohort);

/// Shortest round-tripping decimal form used for times in cohort files.
std::string format_time(double value);

}  // namespace idm
