#pragma once

// Small text helpers shared by the delimited-file readers and writers.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mfrc {

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char delim);

std::optional<long long> parse_integer(std::string_view s);
std::optional<double> parse_double(std::string_view s);

// Shortest round-trip representation is not guaranteed by iostreams, so state
// dumps use a fixed 17 significant digits.
std::string format_full(double v);
// Summary metrics: 6 significant digits.
std::string format_short(double v);

}  // namespace mfrc
