#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace oap {

/// Shortest decimal text that parses back to exactly `value`.
std::string format_number(double value);

/// Whole-token parse; nullopt on trailing garbage, empty input or overflow.
std::optional<double> parse_number(std::string_view token);

std::vector<std::string_view> split(std::string_view text, char sep);

}  // namespace oap
