#include "realseal/timeutil.hpp"

#include <chrono>
#include <cstdio>

namespace realseal {

namespace {

// Civil-calendar conversions on the proleptic Gregorian calendar
// (Hinnant's days_from_civil construction).
std::int64_t days_from_civil(std::int64_t y, int m, int d) {
    y -= m <= 2;
    std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    std::int64_t yoe = y - era * 400;
    std::int64_t doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    std::int64_t doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + doe - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, int& m, int& d) {
    z += 719468;
    std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    std::int64_t doe = z - era * 146097;
    std::int64_t yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    std::int64_t yr = yoe + era * 400;
    std::int64_t doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    std::int64_t mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = yr + (m <= 2);
}

bool is_leap(std::int64_t y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

int days_in_month(std::int64_t y, int m) {
    static const int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return kDays[m - 1];
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

bool parse_fixed_digits(std::string_view s, std::size_t pos, int width, std::int64_t& out) {
    out = 0;
    for (int i = 0; i < width; ++i) {
        char c = s[pos + i];
        if (c < '0' || c > '9') return false;
        out = out * 10 + (c - '0');
    }
    return true;
}

}  // namespace

std::string format_utc(std::int64_t seconds_since_epoch) {
    std::int64_t days = floor_div(seconds_since_epoch, 86400);
    std::int64_t rem = seconds_since_epoch - days * 86400;
    std::int64_t y;
    int m, d;
    civil_from_days(days, y, m, d);
    int hh = static_cast<int>(rem / 3600);
    int mm = static_cast<int>((rem % 3600) / 60);
    int ss = static_cast<int>(rem % 60);
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%04lld-%02d-%02dT%02d:%02d:%02dZ",
                  static_cast<long long>(y), m, d, hh, mm, ss);
    return buf;
}

std::optional<std::int64_t> parse_utc(std::string_view text) {
    // YYYY-MM-DDThh:mm:ssZ, exactly 20 chars.
    if (text.size() != 20) return std::nullopt;
    if (text[4] != '-' || text[7] != '-' || text[10] != 'T' || text[13] != ':' ||
        text[16] != ':' || text[19] != 'Z') {
        return std::nullopt;
    }
    std::int64_t y, mo, d, hh, mm, ss;
    if (!parse_fixed_digits(text, 0, 4, y) || !parse_fixed_digits(text, 5, 2, mo) ||
        !parse_fixed_digits(text, 8, 2, d) || !parse_fixed_digits(text, 11, 2, hh) ||
        !parse_fixed_digits(text, 14, 2, mm) || !parse_fixed_digits(text, 17, 2, ss)) {
        return std::nullopt;
    }
    if (y < 1 || y > 9999 || mo < 1 || mo > 12) return std::nullopt;
    if (d < 1 || d > days_in_month(y, static_cast<int>(mo))) return std::nullopt;
    if (hh > 23 || mm > 59 || ss > 59) return std::nullopt;
    return days_from_civil(y, static_cast<int>(mo), static_cast<int>(d)) * 86400 +
           hh * 3600 + mm * 60 + ss;
}

std::int64_t now_utc() {
    return std::chrono::duration_cast<std::chrono::seconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

}  // namespace realseal
