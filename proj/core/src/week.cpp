#include "epiquery/week.hpp"

#include <cstdio>

#include "epiquery/error.hpp"

namespace epiquery {

using namespace std::chrono;

Date parse_date(const std::string& iso) {
    int y = 0;
    unsigned m = 0, d = 0;
    char trailing = 0;
    if (iso.size() != 10 || std::sscanf(iso.c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &trailing) != 3) {
        throw Error(ErrorKind::input, "invalid date '" + iso + "' (expected YYYY-MM-DD)");
    }
    year_month_day ymd{year{y}, month{m}, day{d}};
    if (!ymd.ok()) {
        throw Error(ErrorKind::input, "invalid calendar date '" + iso + "'");
    }
    return sys_days{ymd};
}

std::string format_date(Date dt) {
    year_month_day ymd{dt};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()),
                  unsigned(ymd.day()));
    return buf;
}

bool is_monday(Date d) {
    return weekday{d} == Monday;
}

Date monday_on_or_before(Date d) {
    unsigned since_monday = (weekday{d}.c_encoding() + 6) % 7; // Sunday encodes as 0
    return d - days{since_monday};
}

Week::Week(Date start) : start_(start) {
    if (!is_monday(start)) {
        throw Error(ErrorKind::input, "week start " + format_date(start) + " is not a Monday");
    }
}

Week Week::containing(Date d) {
    return Week{monday_on_or_before(d)};
}

Week Week::parse(const std::string& iso) {
    return Week{parse_date(iso)};
}

Week Week::next() const {
    return Week{start_ + days{7}};
}

Week Week::prev() const {
    return Week{start_ - days{7}};
}

int weeks_between(const Week& a, const Week& b) {
    return static_cast<int>((b.start() - a.start()).count() / 7);
}

Week shift_weeks(const Week& w, int n) {
    return Week{w.start() + days{7 * n}};
}

} // namespace epiquery
