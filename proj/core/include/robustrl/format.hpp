#pragma once

#include <string>
#include <string_view>

namespace robustrl {

/// Shortest decimal string that parses back to the same double; '.' decimal
/// separator regardless of locale.
std::string format_double(double x);

/// Strict, locale-independent parse of a whole field. Throws ValidationError.
double parse_double(std::string_view text);

}  // namespace robustrl
