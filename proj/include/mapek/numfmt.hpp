#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace mapek {

/// Shortest text that parses back to exactly `value`.
std::string format_number(double value);

/// Fixed notation with six decimals, the event-log float format.
std::string format_fixed6(double value);

std::optional<double> parse_double(std::string_view text);
std::optional<std::uint64_t> parse_unsigned(std::string_view text);
std::optional<std::int64_t> parse_signed(std::string_view text);

std::string_view trim(std::string_view text);

}  // namespace mapek
