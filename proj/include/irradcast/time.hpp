#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace irradcast {

/// UTC instant at one-second resolution.
using Instant = std::chrono::sys_seconds;
using Seconds = std::chrono::seconds;

/// Parses `YYYY-MM-DDTHH:MM[:SS][Z]`. A space may replace the `T`.
/// Throws RangeError on malformed text (callers attach line context).
Instant parse_iso8601(std::string_view text);

/// Formats as `YYYY-MM-DDTHH:MM:SSZ`.
std::string format_iso8601(Instant t);

/// Julian day (UT) of an instant, fractional.
double julian_day(Instant t);

/// Fractional day of year, 0 at January 1 00:00 UTC.
double day_of_year_fraction(Instant t);

int utc_year(Instant t);

/// Minutes since local midnight for a fixed UTC offset (minutes).
int local_minute_of_day(Instant t, int utc_offset_minutes);

}  // namespace irradcast
