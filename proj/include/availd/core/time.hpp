#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

namespace availd {

/// UTC instant at whole-second resolution. All schedule arithmetic is UTC.
using Timestamp = std::chrono::sys_seconds;
using Seconds = std::chrono::seconds;
/// Fractional durations appear only in derived figures (allowed downtime, margins).
using FractionalSeconds = std::chrono::duration<double>;

inline constexpr std::int64_t kSecondsPerMinute = 60;
inline constexpr std::int64_t kSecondsPerHour = 3600;
inline constexpr std::int64_t kSecondsPerDay = 86400;

/// Parses RFC3339 (`2025-03-01T04:00:00Z`, optional fraction, `Z` or `+hh:mm`).
/// Fractional seconds are truncated. Throws ValidationError on malformed input.
Timestamp parse_rfc3339(std::string_view text);

/// Formats as `YYYY-MM-DDTHH:MM:SSZ`.
std::string format_rfc3339(Timestamp at);

inline Timestamp from_unix(std::int64_t seconds) { return Timestamp{Seconds{seconds}}; }
inline std::int64_t to_unix(Timestamp at) { return at.time_since_epoch().count(); }

/// Midnight UTC of the day containing `at`.
Timestamp start_of_day(Timestamp at);

/// Midnight UTC of January 1st of the year containing `at`.
Timestamp start_of_year(Timestamp at);

}  // namespace availd
