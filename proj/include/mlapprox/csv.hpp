#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mlapprox {

// Shortest decimal string that parses back to the same double.
std::string format_double(double value);
std::string format_bool(bool value);

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char delimiter);

// Strict parsers: the whole (trimmed) string must be consumed.
double parse_double(std::string_view s);
std::int64_t parse_int(std::string_view s);
std::uint64_t parse_uint(std::string_view s);
bool parse_bool(std::string_view s);

}  // namespace mlapprox
