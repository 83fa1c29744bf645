#include "epiquery/epi_series.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "epiquery/csv.hpp"
#include "epiquery/error.hpp"

namespace epiquery {

void EpiSeries::add(const std::string& area_id, Date date, double count) {
    if (area_id.empty()) {
        throw Error(ErrorKind::input, "empty area id in series");
    }
    if (!(count >= 0.0)) {
        throw Error(ErrorKind::input,
                    "negative count for (" + area_id + ", " + format_date(date) + ")");
    }
    if (kind_ == SeriesKind::weekly_deaths && !is_monday(date)) {
        throw Error(ErrorKind::input,
                    "weekly series date " + format_date(date) + " is not a Monday");
    }
    if (!by_area_[area_id].emplace(date, count).second) {
        throw Error(ErrorKind::input,
                    "duplicate observation (" + area_id + ", " + format_date(date) + ")");
    }
}

std::vector<std::string> EpiSeries::areas() const {
    std::vector<std::string> out;
    out.reserve(by_area_.size());
    for (const auto& [id, s] : by_area_) {
        out.push_back(id);
    }
    return out;
}

const std::map<Date, double>& EpiSeries::series(const std::string& area_id) const {
    auto it = by_area_.find(area_id);
    if (it == by_area_.end()) {
        throw Error(ErrorKind::degenerate, "no series for area '" + area_id + "'");
    }
    return it->second;
}

WeeklyCounts EpiSeries::weekly() const {
    WeeklyCounts out;
    for (const auto& [id, s] : by_area_) {
        auto& weeks = out[id];
        for (const auto& [date, count] : s) {
            if (kind_ == SeriesKind::weekly_deaths) {
                weeks.emplace(Week{date}, count);
            } else {
                weeks[Week::containing(date)] += count;
            }
        }
    }
    return out;
}

EpiSeries EpiSeries::load_cases_csv(const std::filesystem::path& path) {
    csv::Reader reader(path, {"date", "area_id", "cases"});
    EpiSeries out(SeriesKind::daily_cases);
    std::vector<std::string> row;
    while (reader.next(row)) {
        try {
            out.add(row[1], parse_date(row[0]), csv::parse_double(reader, row[2], "cases"));
        } catch (const Error& e) {
            reader.fail(e.what());
        }
    }
    return out;
}

EpiSeries EpiSeries::load_mortality_csv(const std::filesystem::path& path) {
    csv::Reader reader(path, {"week_start", "area_id", "deaths"});
    EpiSeries out(SeriesKind::weekly_deaths);
    std::vector<std::string> row;
    while (reader.next(row)) {
        try {
            out.add(row[1], parse_date(row[0]), csv::parse_double(reader, row[2], "deaths"));
        } catch (const Error& e) {
            reader.fail(e.what());
        }
    }
    return out;
}

void EpiSeries::write_csv(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorKind::input, "cannot write '" + path.string() + "'");
    }
    out << (kind_ == SeriesKind::daily_cases ? "date,area_id,cases\n"
                                             : "week_start,area_id,deaths\n");
    char buf[32];
    for (const auto& [id, s] : by_area_) {
        for (const auto& [date, count] : s) {
            if (count == std::floor(count)) {
                std::snprintf(buf, sizeof(buf), "%.0f", count);
            } else {
                std::snprintf(buf, sizeof(buf), "%.17g", count);
            }
            out << format_date(date) << ',' << csv::escape(id) << ',' << buf << '\n';
        }
    }
}

} // namespace epiquery
