#pragma once

#include <string>
#include <string_view>

namespace fockrad {

// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);

// Strict parse of a whole field; accepts "nan", "inf", "-inf".
// Throws ConfigError naming `what` on failure.
double parse_double(std::string_view text, std::string_view what);
long long parse_int(std::string_view text, std::string_view what);

std::string_view trim(std::string_view text);

}  // namespace fockrad
