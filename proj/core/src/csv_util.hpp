#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace regimeshift::detail {

/// Splits one CSV record. Double-quoted fields may contain commas and `""` escapes.
std::vector<std::string> split_csv_line(std::string_view line);

/// Strips a trailing '\r' and surrounding ASCII whitespace.
std::string_view trim(std::string_view s);

std::string to_lower(std::string_view s);

/// Formats a double with the shortest representation that round-trips.
std::string format_double(double v);

}  // namespace regimeshift::detail
