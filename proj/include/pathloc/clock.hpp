#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace pathloc {

// UTC instant with millisecond resolution. Parsed from and formatted as
// RFC 3339 ("2015-09-30T08:00:00Z", optional fractional seconds).
struct UtcInstant {
    int64_t ms = 0;  // milliseconds since the Unix epoch

    auto operator<=>(const UtcInstant&) const = default;

    UtcInstant plus_seconds(double s) const { return {ms + static_cast<int64_t>(s * 1000.0)}; }
    UtcInstant plus_ms(int64_t m) const { return {ms + m}; }
    double seconds_until(UtcInstant later) const { return static_cast<double>(later.ms - ms) / 1000.0; }
};

UtcInstant parse_rfc3339(std::string_view text, int line = -1);

std::string format_rfc3339(UtcInstant t);

}  // namespace pathloc
