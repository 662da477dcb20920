#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace latincut {

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);

/// Strict parse of a whole string as a double (surrounding blanks allowed).
std::optional<double> parse_double(std::string_view text);

std::optional<long long> parse_integer(std::string_view text);

std::string_view trim(std::string_view text);

}  // namespace latincut
