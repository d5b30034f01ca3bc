#include <doctest.h>

#include "mlab/time.hpp"

using namespace mlab;

TEST_CASE("iso8601 parse and format round trip") {
  const char* samples[] = {"2017-07-01T00:00:00Z", "1999-12-31T23:59:59Z", "2016-02-29T12:00:00Z"};
  for (const char* s : samples) {
    const auto t = parse_iso8601(s);
    REQUIRE(t.has_value());
    CHECK(format_iso8601(*t) == s);
  }
}

TEST_CASE("iso8601 accepts date-only and offset forms") {
  CHECK(parse_iso8601("2017-07-01")->secs == parse_iso8601("2017-07-01T00:00:00Z")->secs);
  CHECK(parse_iso8601("2017-07-01T08:30:00+00:00")->secs ==
        parse_iso8601("2017-07-01T08:30:00Z")->secs);
}

TEST_CASE("iso8601 rejects malformed input") {
  CHECK_FALSE(parse_iso8601("2017-13-01").has_value());
  CHECK_FALSE(parse_iso8601("2017-02-30").has_value());
  CHECK_FALSE(parse_iso8601("yesterday").has_value());
  CHECK_FALSE(parse_iso8601("2017-07-01T25:00:00Z").has_value());
  CHECK_FALSE(parse_iso8601("2017-07-01T08:30:00+02:00").has_value());
}

TEST_CASE("add_months shifts calendar months") {
  const auto t = parse_iso8601_or_throw("2018-01-01T00:00:00Z");
  CHECK(format_iso8601(add_months(t, -6)) == "2017-07-01T00:00:00Z");
  CHECK(format_iso8601(add_months(t, -3)) == "2017-10-01T00:00:00Z");
  CHECK(format_iso8601(add_months(t, 12)) == "2019-01-01T00:00:00Z");
}

TEST_CASE("add_months clamps the day of month") {
  CHECK(format_iso8601(add_months(parse_iso8601_or_throw("2016-03-31T10:00:00Z"), -1)) ==
        "2016-02-29T10:00:00Z");
  CHECK(format_iso8601(add_months(parse_iso8601_or_throw("2017-03-31T10:00:00Z"), -1)) ==
        "2017-02-28T10:00:00Z");
  CHECK(format_iso8601(add_months(parse_iso8601_or_throw("2017-01-31T00:00:00Z"), 1)) ==
        "2017-02-28T00:00:00Z");
}

TEST_CASE("window parsing and containment") {
  const auto w = parse_window("2017-01-01..2017-07-01");
  REQUIRE(w.has_value());
  CHECK(w->contains(parse_iso8601_or_throw("2017-01-01T00:00:00Z")));
  CHECK(w->contains(parse_iso8601_or_throw("2017-06-30T23:59:59Z")));
  CHECK_FALSE(w->contains(parse_iso8601_or_throw("2017-07-01T00:00:00Z")));
  CHECK_FALSE(parse_window("2017-07-01..2017-01-01").has_value());
  CHECK_FALSE(parse_window("2017-07-01").has_value());
}
