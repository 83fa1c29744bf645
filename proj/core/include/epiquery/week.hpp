#pragma once

#include <chrono>
#include <compare>
#include <string>

namespace epiquery {

/// Calendar date with day resolution.
using Date = std::chrono::sys_days;

Date parse_date(const std::string& iso); // "YYYY-MM-DD"
std::string format_date(Date d);
bool is_monday(Date d);
Date monday_on_or_before(Date d);

/// An analysis week, identified by its Monday start date.
class Week {
public:
    Week() : start_(std::chrono::sys_days{std::chrono::days{-3}}) {} // epoch Monday
    explicit Week(Date start);             // throws unless start is a Monday
    static Week containing(Date d);        // week whose Monday..Sunday range holds d
    static Week parse(const std::string& iso);

    Date start() const { return start_; }
    Date day(int i) const { return start_ + std::chrono::days{i}; } // i in [0,6]
    Week next() const;
    Week prev() const;
    std::string str() const { return format_date(start_); }

    friend auto operator<=>(const Week&, const Week&) = default;

private:
    Date start_;
};

/// Signed number of whole weeks from a to b.
int weeks_between(const Week& a, const Week& b);

/// b shifted by n weeks (n may be negative).
Week shift_weeks(const Week& w, int n);

} // namespace epiquery
