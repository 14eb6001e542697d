#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>

namespace swarmskills {

inline constexpr std::int64_t kSecondsPerDay = 86400;

// UTC instant with second precision. All persisted timestamps are RFC 3339.
struct Timestamp {
    std::int64_t secs = 0;

    auto operator<=>(const Timestamp&) const = default;

    Timestamp plus_seconds(std::int64_t s) const { return Timestamp{secs + s}; }
    Timestamp plus_days(std::int64_t d) const { return Timestamp{secs + d * kSecondsPerDay}; }
    double seconds_until(Timestamp later) const { return static_cast<double>(later.secs - secs); }
};

constexpr double days(double n) { return n * static_cast<double>(kSecondsPerDay); }

// Accepts "YYYY-MM-DDThh:mm:ss" with optional fractional seconds (truncated)
// and either "Z" or a "+hh:mm"/"-hh:mm" offset. Returns nullopt on anything else.
std::optional<Timestamp> parse_rfc3339(const std::string& text);

// Canonical form: "YYYY-MM-DDThh:mm:ssZ".
std::string format_rfc3339(Timestamp t);

// "YYYYMMDD" in UTC, used for evolution record ids.
std::string utc_compact_date(Timestamp t);

} // namespace swarmskills
