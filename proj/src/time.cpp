#include "irradcast/time.hpp"

#include <charconv>
#include <cstdio>

#include "irradcast/error.hpp"

namespace irradcast {
namespace {

int parse_field(std::string_view text, std::size_t pos, std::size_t len) {
  if (pos + len > text.size()) throw RangeError("truncated timestamp '" + std::string(text) + "'");
  int value = 0;
  const char* first = text.data() + pos;
  auto [ptr, ec] = std::from_chars(first, first + len, value);
  if (ec != std::errc{} || ptr != first + len)
    throw RangeError("malformed timestamp '" + std::string(text) + "'");
  return value;
}

void expect(std::string_view text, std::size_t pos, std::string_view allowed) {
  if (pos >= text.size() || allowed.find(text[pos]) == std::string_view::npos)
    throw RangeError("malformed timestamp '" + std::string(text) + "'");
}

}  // namespace

Instant parse_iso8601(std::string_view text) {
  while (!text.empty() && (text.back() == ' ' || text.back() == '\r')) text.remove_suffix(1);
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  if (!text.empty() && text.back() == 'Z') text.remove_suffix(1);

  const int year = parse_field(text, 0, 4);
  expect(text, 4, "-");
  const int month = parse_field(text, 5, 2);
  expect(text, 7, "-");
  const int day = parse_field(text, 8, 2);
  expect(text, 10, "T ");
  const int hour = parse_field(text, 11, 2);
  expect(text, 13, ":");
  const int minute = parse_field(text, 14, 2);
  int second = 0;
  if (text.size() > 16) {
    expect(text, 16, ":");
    second = parse_field(text, 17, 2);
    if (text.size() != 19) throw RangeError("malformed timestamp '" + std::string(text) + "'");
  }

  const std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{unsigned(month)},
                                        std::chrono::day{unsigned(day)}};
  if (!ymd.ok() || hour > 23 || minute > 59 || second > 59)
    throw RangeError("invalid calendar value in '" + std::string(text) + "'");
  return std::chrono::sys_days{ymd} + std::chrono::hours{hour} + std::chrono::minutes{minute} +
         Seconds{second};
}

std::string format_iso8601(Instant t) {
  const auto days = std::chrono::floor<std::chrono::days>(t);
  const std::chrono::year_month_day ymd{days};
  const std::chrono::hh_mm_ss hms{t - days};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", int(ymd.year()), unsigned(ymd.month()),
                unsigned(ymd.day()), int(hms.hours().count()), int(hms.minutes().count()),
                int(hms.seconds().count()));
  return buf;
}

double julian_day(Instant t) {
  // 1970-01-01T00:00Z is JD 2440587.5
  return 2440587.5 + double(t.time_since_epoch().count()) / 86400.0;
}

double day_of_year_fraction(Instant t) {
  const auto days = std::chrono::floor<std::chrono::days>(t);
  const std::chrono::year_month_day ymd{days};
  const std::chrono::sys_days jan1{ymd.year() / std::chrono::January / 1};
  return double((t - jan1).count()) / 86400.0;
}

int utc_year(Instant t) {
  return int(std::chrono::year_month_day{std::chrono::floor<std::chrono::days>(t)}.year());
}

int local_minute_of_day(Instant t, int utc_offset_minutes) {
  const auto local = t + std::chrono::minutes{utc_offset_minutes};
  const auto since_midnight = local - std::chrono::floor<std::chrono::days>(local);
  return int(std::chrono::duration_cast<std::chrono::minutes>(since_midnight).count());
}

}  // namespace irradcast
