#include "amf/calendar.hpp"

#include <charconv>
#include <cstdio>

#include "amf/error.hpp"

namespace amf {

namespace {

using namespace std::chrono;

int parse_int(std::string_view s, std::string_view whole) {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) {
        throw Error(ErrorCode::Validation, "malformed date '" + std::string(whole) + "'");
    }
    return v;
}

}  // namespace

Date parse_date(std::string_view text) {
    // Accept a trailing time component ("2007-01-05T00:00:00") by truncation.
    std::string_view s = text.substr(0, std::min<std::size_t>(text.size(), 10));
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') {
        throw Error(ErrorCode::Validation, "malformed date '" + std::string(text) + "'");
    }
    const int y = parse_int(s.substr(0, 4), text);
    const int m = parse_int(s.substr(5, 2), text);
    const int d = parse_int(s.substr(8, 2), text);
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) {
        throw Error(ErrorCode::Validation, "invalid calendar date '" + std::string(text) + "'");
    }
    return sys_days{ymd};
}

std::string format_date(Date d) {
    const year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

Date make_date(int y, unsigned m, unsigned d) {
    const year_month_day ymd{year{y}, month{m}, day{d}};
    if (!ymd.ok()) throw Error(ErrorCode::InvalidArgument, "invalid calendar date");
    return sys_days{ymd};
}

int year_of(Date d) { return static_cast<int>(year_month_day{d}.year()); }

bool is_friday(Date d) { return weekday{d} == Friday; }

Date week_slot(Date d) {
    const auto wd = weekday{d};
    return d + (Friday - wd);  // weekday difference is taken modulo 7
}

Date friday_on_or_before(Date d) {
    const auto wd = weekday{d};
    return d - (wd - Friday);
}

std::vector<Date> weekly_grid(Date first, std::size_t n) {
    if (!is_friday(first)) throw Error(ErrorCode::InvalidArgument, "weekly grid must start on a Friday");
    std::vector<Date> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(first + days{7 * static_cast<int>(i)});
    return out;
}

std::size_t count_fridays(Date from, Date to) {
    if (to < from) return 0;
    const Date first = week_slot(from);
    if (first > to) return 0;
    return static_cast<std::size_t>((to - first).count() / 7 + 1);
}

}  // namespace amf
