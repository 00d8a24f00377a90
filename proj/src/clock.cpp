#include "pathloc/clock.hpp"

#include <cctype>
#include <cstdio>

#include "pathloc/error.hpp"
#include "pathloc/strings.hpp"

namespace pathloc {

namespace {

// days since 1970-01-01 for a civil date (Howard Hinnant's algorithm)
int64_t days_from_civil(int64_t y, int m, int d) {
    y -= m <= 2;
    int64_t era = (y >= 0 ? y : y - 399) / 400;
    int64_t yoe = y - era * 400;
    int64_t doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    int64_t doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + doe - 719468;
}

void civil_from_days(int64_t z, int& y, int& m, int& d) {
    z += 719468;
    int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    int64_t doe = z - era * 146097;
    int64_t yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    int64_t yr = yoe + era * 400;
    int64_t doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    int64_t mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yr + (m <= 2));
}

int fixed_digits(std::string_view s, size_t pos, int n, std::string_view what, int line) {
    if (pos + n > s.size()) throw schema_error("timestamp too short: '" + std::string(s) + "'", line);
    int v = 0;
    for (int i = 0; i < n; ++i) {
        char c = s[pos + i];
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw schema_error(std::string(what) + ": bad digit in '" + std::string(s) + "'", line);
        v = v * 10 + (c - '0');
    }
    return v;
}

constexpr int days_in_month(int y, int m) {
    constexpr int k[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && ((y % 4 == 0 && y % 100 != 0) || y % 400 == 0)) return 29;
    return k[m - 1];
}

}  // namespace

UtcInstant parse_rfc3339(std::string_view raw, int line) {
    std::string_view s = trim(raw);
    // YYYY-MM-DDTHH:MM:SS[.fff...]Z
    int year = fixed_digits(s, 0, 4, "year", line);
    int month = fixed_digits(s, 5, 2, "month", line);
    int day = fixed_digits(s, 8, 2, "day", line);
    int hour = fixed_digits(s, 11, 2, "hour", line);
    int minute = fixed_digits(s, 14, 2, "minute", line);
    int second = fixed_digits(s, 17, 2, "second", line);
    if (s.size() < 20 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != 't') ||
        s[13] != ':' || s[16] != ':')
        throw schema_error("malformed RFC 3339 timestamp: '" + std::string(s) + "'", line);
    size_t pos = 19;
    int msec = 0;
    if (pos < s.size() && s[pos] == '.') {
        ++pos;
        int scale = 100;
        size_t frac_digits = 0;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
            if (frac_digits < 3) msec += (s[pos] - '0') * scale;
            scale /= 10;
            ++pos;
            ++frac_digits;
        }
        if (frac_digits == 0)
            throw schema_error("empty fractional seconds: '" + std::string(s) + "'", line);
    }
    if (pos + 1 != s.size() || (s[pos] != 'Z' && s[pos] != 'z'))
        throw schema_error("timestamp must be UTC ('Z'-suffixed): '" + std::string(s) + "'", line);
    if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month) || hour > 23 ||
        minute > 59 || second > 60)
        throw schema_error("timestamp field out of range: '" + std::string(s) + "'", line);
    if (second == 60) second = 59;  // fold leap seconds
    int64_t days = days_from_civil(year, month, day);
    int64_t ms = ((days * 24 + hour) * 60 + minute) * 60000 + second * 1000 + msec;
    return {ms};
}

std::string format_rfc3339(UtcInstant t) {
    int64_t ms = t.ms;
    int64_t msec = ms % 1000;
    int64_t secs = ms / 1000;
    if (msec < 0) {
        msec += 1000;
        secs -= 1;
    }
    int64_t days = secs / 86400;
    int64_t sod = secs % 86400;
    if (sod < 0) {
        sod += 86400;
        days -= 1;
    }
    int y, m, d;
    civil_from_days(days, y, m, d);
    char buf[40];
    if (msec != 0) {
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02lld:%02lld:%02lld.%03lldZ", y, m, d,
                      static_cast<long long>(sod / 3600), static_cast<long long>(sod / 60 % 60),
                      static_cast<long long>(sod % 60), static_cast<long long>(msec));
    } else {
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02lld:%02lld:%02lldZ", y, m, d,
                      static_cast<long long>(sod / 3600), static_cast<long long>(sod / 60 % 60),
                      static_cast<long long>(sod % 60));
    }
    return buf;
}

}  // namespace pathloc
