#include "swarmskills/sha256.hpp"
#include "swarmskills/time.hpp"

#include <doctest.h>

using namespace swarmskills;

TEST_CASE("rfc3339 round-trips canonical form") {
    const char* samples[] = {
        "1970-01-01T00:00:00Z", "2026-04-30T12:00:00Z", "2026-12-31T23:59:59Z",
        "2000-02-29T06:30:00Z", "1969-07-20T20:17:40Z",
    };
    for (const char* s : samples) {
        const auto t = parse_rfc3339(s);
        REQUIRE(t.has_value());
        CHECK(format_rfc3339(*t) == s);
    }
    CHECK(parse_rfc3339("1970-01-01T00:00:00Z")->secs == 0);
    CHECK(parse_rfc3339("1970-01-02T00:00:00Z")->secs == kSecondsPerDay);
}

TEST_CASE("rfc3339 accepts offsets and fractional seconds") {
    CHECK(parse_rfc3339("2026-04-30T12:00:00+02:00")->secs ==
          parse_rfc3339("2026-04-30T10:00:00Z")->secs);
    CHECK(parse_rfc3339("2026-04-30T10:00:00-01:30")->secs ==
          parse_rfc3339("2026-04-30T11:30:00Z")->secs);
    CHECK(parse_rfc3339("2026-04-30T12:00:00.25Z")->secs ==
          parse_rfc3339("2026-04-30T12:00:00Z")->secs);
}

TEST_CASE("rfc3339 rejects malformed input") {
    CHECK_FALSE(parse_rfc3339("").has_value());
    CHECK_FALSE(parse_rfc3339("2026-04-30").has_value());
    CHECK_FALSE(parse_rfc3339("2026-04-30T12:00:00").has_value()); // no zone
    CHECK_FALSE(parse_rfc3339("2026-13-01T00:00:00Z").has_value());
    CHECK_FALSE(parse_rfc3339("2026-04-30T25:00:00Z").has_value());
    CHECK_FALSE(parse_rfc3339("2026-04-30T12:00:00Zjunk").has_value());
    CHECK_FALSE(parse_rfc3339("not a time").has_value());
}

TEST_CASE("compact date is UTC") {
    CHECK(utc_compact_date(*parse_rfc3339("2026-04-30T23:59:59Z")) == "20260430");
    CHECK(utc_compact_date(*parse_rfc3339("2026-05-01T00:00:00Z")) == "20260501");
}

TEST_CASE("sha256 known vectors") {
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    // 56 bytes forces the two-block padding path
    CHECK(sha256_hex("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq") ==
          "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}
