#include "mlab/time.hpp"

#include <cstdio>
#include <stdexcept>

namespace mlab {

// Howard Hinnant's civil-days algorithms.
std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

CivilDate civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return CivilDate{static_cast<int>(y + (m <= 2)), m, d};
}

unsigned last_day_of_month(int y, unsigned m) {
  static constexpr unsigned kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2) {
    const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
    return leap ? 29 : 28;
  }
  return kDays[m - 1];
}

namespace {

bool parse_fixed_uint(std::string_view s, std::size_t pos, std::size_t len, unsigned& out) {
  if (pos + len > s.size()) return false;
  unsigned v = 0;
  for (std::size_t i = 0; i < len; ++i) {
    const char c = s[pos + i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + static_cast<unsigned>(c - '0');
  }
  out = v;
  return true;
}

}  // namespace

std::optional<UtcTime> parse_iso8601(std::string_view s) {
  unsigned y = 0, mo = 0, d = 0, hh = 0, mm = 0, ss = 0;
  if (!parse_fixed_uint(s, 0, 4, y)) return std::nullopt;
  if (s.size() < 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  if (!parse_fixed_uint(s, 5, 2, mo) || !parse_fixed_uint(s, 8, 2, d)) return std::nullopt;
  if (mo < 1 || mo > 12 || d < 1 || d > last_day_of_month(static_cast<int>(y), mo)) return std::nullopt;

  std::size_t pos = 10;
  if (pos < s.size()) {
    if (s[pos] != 'T' && s[pos] != ' ') return std::nullopt;
    ++pos;
    if (!parse_fixed_uint(s, pos, 2, hh) || pos + 8 > s.size() || s[pos + 2] != ':' ||
        s[pos + 5] != ':' || !parse_fixed_uint(s, pos + 3, 2, mm) ||
        !parse_fixed_uint(s, pos + 6, 2, ss))
      return std::nullopt;
    if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
    pos += 8;
    if (pos < s.size()) {
      const std::string_view rest = s.substr(pos);
      if (rest != "Z" && rest != "+00:00" && rest != "+0000") return std::nullopt;
    }
  }
  const std::int64_t days = days_from_civil(static_cast<int>(y), mo, d);
  return UtcTime{days * 86400 + hh * 3600 + mm * 60 + ss};
}

UtcTime parse_iso8601_or_throw(std::string_view s) {
  auto t = parse_iso8601(s);
  if (!t) throw std::runtime_error("invalid ISO-8601 timestamp: '" + std::string(s) + "'");
  return *t;
}

std::string format_iso8601(UtcTime t) {
  std::int64_t days = t.secs / 86400;
  std::int64_t tod = t.secs % 86400;
  if (tod < 0) {
    tod += 86400;
    days -= 1;
  }
  const CivilDate c = civil_from_days(days);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", c.year, c.month, c.day,
                static_cast<long long>(tod / 3600), static_cast<long long>((tod / 60) % 60),
                static_cast<long long>(tod % 60));
  return buf;
}

UtcTime add_months(UtcTime t, int months) {
  std::int64_t days = t.secs / 86400;
  std::int64_t tod = t.secs % 86400;
  if (tod < 0) {
    tod += 86400;
    days -= 1;
  }
  const CivilDate c = civil_from_days(days);
  std::int64_t linear = static_cast<std::int64_t>(c.year) * 12 + (static_cast<int>(c.month) - 1) + months;
  const int y = static_cast<int>(linear >= 0 ? linear / 12 : (linear - 11) / 12);
  const unsigned m = static_cast<unsigned>(linear - static_cast<std::int64_t>(y) * 12) + 1;
  const unsigned d = std::min(c.day, last_day_of_month(y, m));
  return UtcTime{days_from_civil(y, m, d) * 86400 + tod};
}

std::optional<TimeWindow> parse_window(std::string_view spec) {
  const auto sep = spec.find("..");
  if (sep == std::string_view::npos) return std::nullopt;
  const auto start = parse_iso8601(spec.substr(0, sep));
  const auto end = parse_iso8601(spec.substr(sep + 2));
  if (!start || !end || !(*start < *end)) return std::nullopt;
  return TimeWindow{*start, *end};
}

}  // namespace mlab
