#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tabletop {

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::vector<std::string> split_lines(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::string to_lower(std::string_view s);

// Shortest decimal form that round-trips exactly (std::to_chars general).
// 2.0 -> "2", 0.5 -> "0.5", 35.25 -> "35.25".
std::string format_double(double v);

// Strict: the whole (trimmed) token must be consumed, otherwise nullopt.
std::optional<double> parse_double(std::string_view s);
std::optional<long> parse_int(std::string_view s);

}  // namespace tabletop
