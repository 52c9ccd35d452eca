// Small string helpers shared by the readers and writers.

#ifndef CDSP_TEXT_H_
#define CDSP_TEXT_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cdsp {

std::string_view trim(std::string_view s);
std::vector<std::string_view> split_whitespace(std::string_view s);
// Comma split without quoting support; fields are not trimmed.
std::vector<std::string_view> split_csv(std::string_view s);

// Full-token parse, nullopt on trailing garbage or empty input.
std::optional<double> parse_double(std::string_view s);

// Shortest representation that round-trips through parse_double.
std::string format_number(double value);

}  // namespace cdsp

#endif  // CDSP_TEXT_H_
