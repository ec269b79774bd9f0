#include "idm/cohort_csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <vector>

#include "idm/errors.hpp"

namespace idm {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

Cohort read_cohort_csv(std::istream& in) {
  static const std::set<std::string> known{"id", "entry", "exit0", "cause0", "exit1", "cause1"};

  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_fields(line);
      break;
    }
  }
  if (header.empty()) throw MalformedRecord("missing header", line_no ? line_no : 1);
  for (const auto& name : header) {
    if (!known.count(name)) throw MalformedRecord("unknown column '" + name + "'", line_no);
  }
  for (const char* required : {"id", "exit0", "cause0"}) {
    if (std::find(header.begin(), header.end(), required) == header.end()) {
      throw MalformedRecord(std::string("header lacks '") + required + "'", line_no);
    }
  }

  Cohort cohort;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw MalformedRecord("expected " + std::to_string(header.size()) + " fields, got " +
                                std::to_string(fields.size()),
                            line_no);
    }
    std::map<std::string, std::string> raw;
    for (std::size_t i = 0; i < header.size(); ++i) raw[header[i]] = fields[i];
    try {
      cohort.push_back(validate_record(raw));
    } catch (const MalformedRecord& e) {
      throw MalformedRecord(e.message(), line_no);
    }
  }
  return cohort;
}

Cohort read_cohort_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open '" + path + "'");
  return read_cohort_csv(in);
}

std::string format_time(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

void write_cohort_csv(std::ostream& out, std::span<const IllnessDeathRecord> cohort) {
  out << "id,entry,exit0,cause0,exit1,cause1\n";
  for (const auto& r : cohort) {
    out << r.id << ',' << format_time(r.entry) << ',' << format_time(r.exit0) << ',';
    switch (r.cause0) {
      case FirstExit::ToIll: out << '1'; break;
      case FirstExit::ToAbsorbed: out << '2'; break;
      case FirstExit::Censored: out << '0'; break;
    }
    out << ',';
    if (r.exit1) out << format_time(*r.exit1);
    out << ',';
    if (r.cause1) out << (*r.cause1 == SecondExit::ToAbsorbed ? '2' : '0');
    out << '\n';
  }
}

}  // namespace idm
