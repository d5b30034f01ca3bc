#ifndef MLAB_TIME_HPP
#define MLAB_TIME_HPP

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace mlab {

// UTC timestamp, second resolution (the granularity GitHub reports).
struct UtcTime {
  std::int64_t secs = 0;  // seconds since 1970-01-01T00:00:00Z

  auto operator<=>(const UtcTime&) const = default;
};

struct CivilDate {
  int year = 1970;
  unsigned month = 1;  // 1..12
  unsigned day = 1;    // 1..31
};

// Proleptic Gregorian day count relative to 1970-01-01.
std::int64_t days_from_civil(int y, unsigned m, unsigned d);
CivilDate civil_from_days(std::int64_t z);
unsigned last_day_of_month(int y, unsigned m);

// Accepts "YYYY-MM-DD" (midnight) or "YYYY-MM-DDTHH:MM:SS" with optional
// trailing "Z" or "+00:00". Anything else yields nullopt.
std::optional<UtcTime> parse_iso8601(std::string_view s);
UtcTime parse_iso8601_or_throw(std::string_view s);

std::string format_iso8601(UtcTime t);

// Calendar-month shift keeping time of day; day-of-month clamps to the
// length of the target month (Mar 31 minus one month -> Feb 28/29).
UtcTime add_months(UtcTime t, int months);

inline double days_between(UtcTime from, UtcTime to) {
  return static_cast<double>(to.secs - from.secs) / 86400.0;
}

// Half-open interval [start, end).
struct TimeWindow {
  UtcTime start;
  UtcTime end;

  bool contains(UtcTime t) const { return start <= t && t < end; }
};

// "START..END" with each side in any accepted ISO-8601 form.
std::optional<TimeWindow> parse_window(std::string_view spec);

}  // namespace mlab

#endif  // MLAB_TIME_HPP
