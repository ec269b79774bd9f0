#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace idm {

enum class ErrorKind {
  MalformedRecord,
  EmptyRiskSet,
  EmptyLandmark,
  ZeroDenominator,
  DegenerateWeight,
  DegenerateCohort,
  TooManyFailures,
  UnsupportedTruncation,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for every estimation failure; callers that
// aggregate over many replications switch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), message_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
};

class MalformedRecord : public Error {
 public:
  MalformedRecord(const std::string& what, std::size_t line = 0)
      : Error(ErrorKind::MalformedRecord,
              line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace idm
