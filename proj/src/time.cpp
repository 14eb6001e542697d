#include "swarmskills/time.hpp"

#include <cctype>
#include <cstdio>

namespace swarmskills {

namespace {

// Days since 1970-01-01 for a proleptic Gregorian civil date.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y += m <= 2;
}

bool read_digits(const std::string& s, std::size_t pos, int count, std::int64_t& out) {
    out = 0;
    for (int i = 0; i < count; ++i) {
        if (pos + i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos + i])))
            return false;
        out = out * 10 + (s[pos + i] - '0');
    }
    return true;
}

} // namespace

std::optional<Timestamp> parse_rfc3339(const std::string& text) {
    std::int64_t year, month, day, hour, minute, second;
    if (!read_digits(text, 0, 4, year)) return std::nullopt;
    if (text.size() < 20 || text[4] != '-' || text[7] != '-') return std::nullopt;
    if (!read_digits(text, 5, 2, month) || !read_digits(text, 8, 2, day)) return std::nullopt;
    if (text[10] != 'T' && text[10] != 't' && text[10] != ' ') return std::nullopt;
    if (!read_digits(text, 11, 2, hour) || text[13] != ':') return std::nullopt;
    if (!read_digits(text, 14, 2, minute) || text[16] != ':') return std::nullopt;
    if (!read_digits(text, 17, 2, second)) return std::nullopt;

    if (month < 1 || month > 12 || day < 1 || day > 31) return std::nullopt;
    if (hour > 23 || minute > 59 || second > 60) return std::nullopt;

    std::size_t pos = 19;
    if (pos < text.size() && text[pos] == '.') { // fractional seconds: truncate
        ++pos;
        std::size_t digits = 0;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            ++pos;
            ++digits;
        }
        if (digits == 0) return std::nullopt;
    }

    std::int64_t offset = 0;
    if (pos >= text.size()) return std::nullopt;
    if (text[pos] == 'Z' || text[pos] == 'z') {
        ++pos;
    } else if (text[pos] == '+' || text[pos] == '-') {
        const bool negative = text[pos] == '-';
        std::int64_t oh, om;
        if (!read_digits(text, pos + 1, 2, oh)) return std::nullopt;
        if (pos + 3 >= text.size() || text[pos + 3] != ':') return std::nullopt;
        if (!read_digits(text, pos + 4, 2, om)) return std::nullopt;
        offset = (oh * 60 + om) * 60;
        if (negative) offset = -offset;
        pos += 6;
    } else {
        return std::nullopt;
    }
    if (pos != text.size()) return std::nullopt;

    const std::int64_t epoch_days = days_from_civil(year, static_cast<unsigned>(month),
                                                    static_cast<unsigned>(day));
    const std::int64_t secs =
        epoch_days * kSecondsPerDay + hour * 3600 + minute * 60 + second - offset;
    return Timestamp{secs};
}

std::string format_rfc3339(Timestamp t) {
    std::int64_t z = t.secs / kSecondsPerDay;
    std::int64_t rem = t.secs % kSecondsPerDay;
    if (rem < 0) {
        rem += kSecondsPerDay;
        --z;
    }
    std::int64_t year;
    unsigned month, day;
    civil_from_days(z, year, month, day);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ",
                  static_cast<long long>(year), month, day,
                  static_cast<long long>(rem / 3600),
                  static_cast<long long>((rem % 3600) / 60),
                  static_cast<long long>(rem % 60));
    return buf;
}

std::string utc_compact_date(Timestamp t) {
    std::int64_t z = t.secs / kSecondsPerDay;
    if (t.secs % kSecondsPerDay < 0) --z;
    std::int64_t year;
    unsigned month, day;
    civil_from_days(z, year, month, day);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04lld%02u%02u", static_cast<long long>(year), month, day);
    return buf;
}

} // namespace swarmskills
