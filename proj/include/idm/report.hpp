#pragma once

#include <string>

namespace idm {

/// Numbers in every CSV output use 12 significant digits.
std::string format_number(double value);

/// Empty string for NaN, else format_number.
std::string format_optional(double value);

}  // namespace idm
