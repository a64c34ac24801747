#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace twistmodel {

/// Shortest representation that round-trips through a double.
std::string format_double(double x);

std::string_view trim(std::string_view s);

std::vector<std::string_view> split(std::string_view s, char sep);

/// Strict full-string parses; nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

}  // namespace twistmodel
