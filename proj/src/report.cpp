#include "idm/report.hpp"

#include <cmath>
#include <cstdio>

namespace idm {

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", value == 0.0 ? 0.0 : value);
  return buf;
}

std::string format_optional(double value) { return std::isnan(value) ? std::string() : format_number(value); }

}  // namespace idm
