#include "mlapprox/csv.hpp"

#include <array>
#include <charconv>
#include <stdexcept>

namespace mlapprox {

std::string format_double(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf.data(), ptr);
}

std::string format_bool(bool value) { return value ? "true" : "false"; }

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(std::string_view s, char delimiter) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(delimiter, start);
    parts.emplace_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

namespace {

template <typename T>
T parse_number(std::string_view s, const char* what) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw std::invalid_argument(std::string("expected ") + what + ", got '" + std::string(s) + "'");
  return value;
}

}  // namespace

double parse_double(std::string_view s) { return parse_number<double>(s, "a number"); }
std::int64_t parse_int(std::string_view s) { return parse_number<std::int64_t>(s, "an integer"); }
std::uint64_t parse_uint(std::string_view s) {
  return parse_number<std::uint64_t>(s, "a nonnegative integer");
}

bool parse_bool(std::string_view s) {
  s = trim(s);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw std::invalid_argument("expected a boolean, got '" + std::string(s) + "'");
}

}  // namespace mlapprox
