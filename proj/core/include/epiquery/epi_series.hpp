#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "epiquery/week.hpp"

namespace epiquery {

enum class SeriesKind {
    daily_cases,
    weekly_deaths,
};

/// Per-area weekly counts, Monday-keyed.
using WeeklyCounts = std::map<std::string, std::map<Week, double>>;

/// Epidemic counts per area: daily case reports or weekly death
/// registrations. Immutable after construction.
class EpiSeries {
public:
    explicit EpiSeries(SeriesKind kind) : kind_(kind) {}

    static EpiSeries load_cases_csv(const std::filesystem::path& path);     // date,area_id,cases
    static EpiSeries load_mortality_csv(const std::filesystem::path& path); // week_start,area_id,deaths
    void write_csv(const std::filesystem::path& path) const;

    /// Adds one observation. Counts must be non-negative; (area, date) pairs
    /// must be unique. Weekly series require Monday dates.
    void add(const std::string& area_id, Date date, double count);

    SeriesKind kind() const { return kind_; }
    std::vector<std::string> areas() const;
    bool has_area(const std::string& area_id) const { return by_area_.count(area_id) != 0; }
    const std::map<Date, double>& series(const std::string& area_id) const;

    /// Weekly aggregation: daily series are summed over the 7 days starting
    /// each Monday (weeks with no observed day are absent); weekly series
    /// map through unchanged.
    WeeklyCounts weekly() const;

    bool operator==(const EpiSeries&) const = default;

private:
    SeriesKind kind_;
    std::map<std::string, std::map<Date, double>> by_area_;
};

} // namespace epiquery
