#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace okr {

/// Shortest decimal text that parses back to the same double; "inf", "-inf", "nan" otherwise.
[[nodiscard]] std::string format_double(double v);

/// Parses a full field as a double (accepts the spellings format_double emits).
[[nodiscard]] std::optional<double> parse_double(std::string_view s);

/// Splits on commas; surrounding spaces and a trailing '\r' are trimmed from each field.
[[nodiscard]] std::vector<std::string_view> split_fields(std::string_view line);

[[nodiscard]] std::string_view trim(std::string_view s);

}  // namespace okr
