#include "epiquery/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "epiquery/csv.hpp"
#include "epiquery/error.hpp"

namespace epiquery {

namespace {

double population_sd(const std::vector<double>& xs) {
    double mean = 0.0;
    for (double x : xs) {
        mean += x;
    }
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) {
        ss += (x - mean) * (x - mean);
    }
    return std::sqrt(ss / static_cast<double>(xs.size()));
}

} // namespace

std::vector<double> moving_average(const std::vector<double>& series, int window) {
    if (window < 1) {
        throw Error(ErrorKind::config, "moving average window must be >= 1");
    }
    if (series.empty()) {
        throw Error(ErrorKind::degenerate, "moving average of an empty series");
    }
    const int n = static_cast<int>(series.size());
    const int left = (window - 1) / 2;
    const int right = window / 2;
    std::vector<double> out(series.size());
    for (int i = 0; i < n; ++i) {
        int lo = std::max(0, i - left);
        int hi = std::min(n - 1, i + right);
        double sum = 0.0;
        for (int j = lo; j <= hi; ++j) {
            sum += series[j];
        }
        out[i] = sum / static_cast<double>(hi - lo + 1);
    }
    return out;
}

DailySeries moving_average(const DailySeries& series, int window) {
    return {series.start, moving_average(series.values, window)};
}

DailySeries to_daily(const EpiSeries& series, const std::string& area_id) {
    const auto& s = series.series(area_id);
    if (s.empty()) {
        throw Error(ErrorKind::degenerate, "empty series for area '" + area_id + "'");
    }
    Date start = s.begin()->first;
    Date last = s.rbegin()->first;
    std::vector<double> values(static_cast<std::size_t>((last - start).count()) + 1, 0.0);
    for (const auto& [date, count] : s) {
        values[static_cast<std::size_t>((date - start).count())] = count;
    }
    return {start, std::move(values)};
}

DailySeries panel_daily_fractions(const Panel& panel, const std::string& area_id,
                                  std::size_t keyword_idx) {
    std::vector<Week> weeks = panel.weeks();
    std::vector<std::pair<Week, double>> present;
    for (const Week& w : weeks) {
        if (panel.has(w, area_id)) {
            present.emplace_back(w, panel.fractions(w, area_id)[keyword_idx]);
        }
    }
    if (present.empty()) {
        throw Error(ErrorKind::degenerate,
                    "area '" + area_id + "' has no panel data in any week");
    }
    Date start = present.front().first.start();
    Date last = present.back().first.day(6);
    std::vector<double> values(static_cast<std::size_t>((last - start).count()) + 1, 0.0);
    for (const auto& [week, fraction] : present) {
        std::size_t offset = static_cast<std::size_t>((week.start() - start).count());
        for (std::size_t d = 0; d < 7; ++d) {
            values[offset + d] = fraction;
        }
    }
    return {start, std::move(values)};
}

LagResult best_lag_correlation(const DailySeries& search, const DailySeries& cases,
                               const LagParams& params) {
    if (params.lag_min_days > params.lag_max_days) {
        throw Error(ErrorKind::config, "empty lag range");
    }
    LagResult result;
    bool found = false;
    const long s_first = search.start.time_since_epoch().count();
    const long s_last = s_first + static_cast<long>(search.values.size()) - 1;
    const long c_first = cases.start.time_since_epoch().count();
    const long c_last = c_first + static_cast<long>(cases.values.size()) - 1;

    for (int lag = params.lag_min_days; lag <= params.lag_max_days; ++lag) {
        long lo = std::max(s_first, c_first - lag);
        long hi = std::min(s_last, c_last - lag);
        long n = hi - lo + 1;
        if (n < params.min_overlap_days) {
            continue;
        }
        double sx = 0.0, sy = 0.0;
        for (long d = lo; d <= hi; ++d) {
            sx += search.values[static_cast<std::size_t>(d - s_first)];
            sy += cases.values[static_cast<std::size_t>(d + lag - c_first)];
        }
        double mx = sx / static_cast<double>(n);
        double my = sy / static_cast<double>(n);
        double sxx = 0.0, syy = 0.0, sxy = 0.0;
        for (long d = lo; d <= hi; ++d) {
            double x = search.values[static_cast<std::size_t>(d - s_first)] - mx;
            double y = cases.values[static_cast<std::size_t>(d + lag - c_first)] - my;
            sxx += x * x;
            syy += y * y;
            sxy += x * y;
        }
        // numerically-constant windows (per-element deviation below ~1e-12
        // of scale) leave the correlation undefined
        double x_floor = static_cast<double>(n) * std::pow(1e-12 * (std::abs(mx) + 1e-30), 2);
        double y_floor = static_cast<double>(n) * std::pow(1e-12 * (std::abs(my) + 1e-30), 2);
        if (sxx <= x_floor || syy <= y_floor) {
            continue; // correlation undefined at this lag
        }
        double r = sxy / std::sqrt(sxx * syy);
        result.correlogram[lag] = r;
        if (!found || r > result.best_correlation) {
            found = true;
            result.best_correlation = r;
            result.best_lag_days = lag;
        }
    }
    if (!found) {
        throw Error(ErrorKind::degenerate,
                    "no lag in range has enough overlapping, non-constant data");
    }
    return result;
}

DailySearch daily_search_from_panel(const Panel& panel) {
    DailySearch out;
    std::vector<Week> weeks = panel.weeks();
    std::map<std::string, bool> all_areas;
    for (const Week& w : weeks) {
        for (const std::string& id : panel.area_ids(w)) {
            all_areas[id] = true;
        }
    }
    for (std::size_t k = 0; k < panel.n_keywords(); ++k) {
        for (const auto& [id, unused] : all_areas) {
            out[k].emplace(id, panel_daily_fractions(panel, id, k));
        }
    }
    return out;
}

DailySearch load_daily_search_csv(const std::filesystem::path& path,
                                  const KeywordRegistry& registry) {
    csv::Reader reader(path, {"date", "area_id", "keyword", "fraction"});
    std::map<std::size_t, std::map<std::string, std::map<Date, double>>> cells;
    std::vector<std::string> row;
    while (reader.next(row)) {
        try {
            Date date = parse_date(row[0]);
            std::size_t kw = registry.index_of(row[2]);
            double fraction = csv::parse_double(reader, row[3], "fraction");
            if (!(fraction >= 0.0 && fraction <= 1.0)) {
                reader.fail("fraction " + row[3] + " out of [0, 1]");
            }
            if (!cells[kw][row[1]].emplace(date, fraction).second) {
                reader.fail("duplicate (date, area, keyword) row");
            }
        } catch (const Error& e) {
            reader.fail(e.what());
        }
    }
    DailySearch out;
    for (auto& [kw, by_area] : cells) {
        for (auto& [id, days] : by_area) {
            Date start = days.begin()->first;
            Date last = days.rbegin()->first;
            std::vector<double> values(static_cast<std::size_t>((last - start).count()) + 1, 0.0);
            for (const auto& [date, f] : days) {
                values[static_cast<std::size_t>((date - start).count())] = f;
            }
            out[kw].emplace(id, DailySeries{start, std::move(values)});
        }
    }
    return out;
}

void write_daily_search_csv(const std::filesystem::path& path, const DailySearch& search,
                            const KeywordRegistry& registry) {
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorKind::input, "cannot write '" + path.string() + "'");
    }
    out << "date,area_id,keyword,fraction\n";
    char buf[40];
    for (const auto& [kw, by_area] : search) {
        const std::string& name = registry.at(kw).canonical;
        for (const auto& [id, series] : by_area) {
            for (std::size_t i = 0; i < series.values.size(); ++i) {
                std::snprintf(buf, sizeof(buf), "%.17g", series.values[i]);
                out << format_date(series.start + std::chrono::days{static_cast<long>(i)}) << ','
                    << csv::escape(id) << ',' << name << ',' << buf << '\n';
            }
        }
    }
}

std::vector<LagTableRow> median_lag_table(const DailySearch& search, const EpiSeries& cases,
                                          const KeywordRegistry& registry,
                                          const LagParams& params) {
    std::vector<LagTableRow> rows;
    for (const auto& [kw, by_area] : search) {
        std::vector<double> correlations;
        std::vector<int> lags;
        for (const auto& [id, series] : by_area) {
            if (!cases.has_area(id)) {
                continue;
            }
            try {
                DailySeries s = moving_average(series, params.smoothing_window);
                DailySeries c = moving_average(to_daily(cases, id), params.smoothing_window);
                LagResult r = best_lag_correlation(s, c, params);
                correlations.push_back(r.best_correlation);
                lags.push_back(r.best_lag_days);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::degenerate) {
                    throw;
                }
                // area skipped: not enough overlap or constant series
            }
        }
        if (correlations.empty()) {
            continue; // keyword omitted
        }
        LagTableRow row;
        row.keyword = registry.at(kw).canonical;
        row.n_areas = correlations.size();
        std::sort(correlations.begin(), correlations.end());
        std::sort(lags.begin(), lags.end());
        std::size_t n = correlations.size();
        if (n % 2 == 1) {
            row.median_correlation = correlations[n / 2];
            row.median_lag_days = lags[n / 2];
        } else {
            row.median_correlation = 0.5 * (correlations[n / 2 - 1] + correlations[n / 2]);
            row.median_lag_days = lags[n / 2 - 1]; // lower-middle element
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

JumpLabels label_jumps(const WeeklyCounts& weekly, JumpRule rule, const JumpParams& params) {
    JumpLabels out;
    out.rule = rule;
    out.params = params;

    if (rule == JumpRule::ratio) {
        for (const auto& [id, weeks] : weekly) {
            for (const auto& [week, count] : weeks) {
                auto prev = weeks.find(week.prev());
                if (prev == weeks.end()) {
                    continue;
                }
                out.labels[{id, week}] =
                    prev->second > 0.0 && count >= params.ratio * prev->second;
            }
        }
        return out;
    }

    if (params.sd_baseline == SdBaseline::per_area_history) {
        for (const auto& [id, weeks] : weekly) {
            std::vector<double> history;
            for (const auto& [week, count] : weeks) {
                auto prev = weeks.find(week.prev());
                if (prev == weeks.end()) {
                    continue;
                }
                double diff = count - prev->second;
                if (history.size() >= 2) {
                    out.labels[{id, week}] = diff > params.sd_multiplier * population_sd(history);
                }
                history.push_back(diff);
            }
        }
        return out;
    }

    // cross_area_week: this week's differences across areas form the baseline
    std::map<Week, std::vector<std::pair<std::string, double>>> diffs_by_week;
    for (const auto& [id, weeks] : weekly) {
        for (const auto& [week, count] : weeks) {
            auto prev = weeks.find(week.prev());
            if (prev == weeks.end()) {
                continue;
            }
            diffs_by_week[week].emplace_back(id, count - prev->second);
        }
    }
    for (const auto& [week, diffs] : diffs_by_week) {
        if (diffs.size() < 2) {
            continue;
        }
        std::vector<double> values;
        values.reserve(diffs.size());
        for (const auto& [id, d] : diffs) {
            values.push_back(d);
        }
        double sd = population_sd(values);
        for (const auto& [id, d] : diffs) {
            out.labels[{id, week}] = d > params.sd_multiplier * sd;
        }
    }
    return out;
}

namespace {

struct ScoredLabel {
    double score;
    bool positive;
};

double auc_mann_whitney(std::vector<ScoredLabel> pairs, std::size_t n_pos, std::size_t n_neg) {
    std::sort(pairs.begin(), pairs.end(),
              [](const ScoredLabel& a, const ScoredLabel& b) { return a.score < b.score; });
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < pairs.size()) {
        std::size_t j = i;
        while (j < pairs.size() && pairs[j].score == pairs[i].score) {
            ++j;
        }
        double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
        for (std::size_t k = i; k < j; ++k) {
            if (pairs[k].positive) {
                rank_sum_pos += midrank;
            }
        }
        i = j;
    }
    double np = static_cast<double>(n_pos);
    double u = rank_sum_pos - np * (np + 1.0) / 2.0;
    return u / (np * static_cast<double>(n_neg));
}

std::vector<std::pair<double, double>> roc_sweep(std::vector<ScoredLabel> pairs,
                                                 std::size_t n_pos, std::size_t n_neg) {
    std::sort(pairs.begin(), pairs.end(),
              [](const ScoredLabel& a, const ScoredLabel& b) { return a.score > b.score; });
    std::vector<std::pair<double, double>> points;
    points.emplace_back(0.0, 0.0);
    std::size_t tp = 0, fp = 0, i = 0;
    while (i < pairs.size()) {
        std::size_t j = i;
        while (j < pairs.size() && pairs[j].score == pairs[i].score) {
            if (pairs[j].positive) {
                ++tp;
            } else {
                ++fp;
            }
            ++j;
        }
        points.emplace_back(static_cast<double>(fp) / static_cast<double>(n_neg),
                            static_cast<double>(tp) / static_cast<double>(n_pos));
        i = j;
    }
    return points;
}

double trapezoid_area(const std::vector<std::pair<double, double>>& points) {
    double area = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        area += (points[i].first - points[i - 1].first) *
                (points[i].second + points[i - 1].second) * 0.5;
    }
    return area;
}

} // namespace

RocResult roc_auc(const ScoreMap& scores, const JumpLabels& labels, int lag_weeks) {
    std::vector<ScoredLabel> pairs;
    std::size_t n_pos = 0, n_neg = 0;
    for (const auto& [key, score] : scores) {
        Week label_week = shift_weeks(key.second, lag_weeks);
        if (!labels.defined(key.first, label_week)) {
            continue;
        }
        bool positive = labels.at(key.first, label_week);
        pairs.push_back({score, positive});
        (positive ? n_pos : n_neg) += 1;
    }
    if (n_pos == 0 || n_neg == 0) {
        throw Error(ErrorKind::degenerate,
                    "ROC needs at least one positive and one negative at lag " +
                        std::to_string(lag_weeks) + " (got " + std::to_string(n_pos) + "/" +
                        std::to_string(n_neg) + ")");
    }
    RocResult result;
    result.lag_weeks = lag_weeks;
    result.n_pos = n_pos;
    result.n_neg = n_neg;
    result.auc = auc_mann_whitney(pairs, n_pos, n_neg);
    result.roc_points = roc_sweep(std::move(pairs), n_pos, n_neg);
    double area = trapezoid_area(result.roc_points);
    if (std::abs(area - result.auc) > 1e-9) {
        throw Error(ErrorKind::degenerate,
                    "AUC cross-check failed: rank method " + std::to_string(result.auc) +
                        " vs trapezoid " + std::to_string(area));
    }
    return result;
}

std::vector<std::pair<int, std::optional<RocResult>>>
auc_vs_lag(const ScoreMap& scores, const JumpLabels& labels, int lag_lo_weeks, int lag_hi_weeks) {
    if (lag_lo_weeks > lag_hi_weeks) {
        throw Error(ErrorKind::config, "empty lag range");
    }
    std::vector<std::pair<int, std::optional<RocResult>>> out;
    for (int lag = lag_lo_weeks; lag <= lag_hi_weeks; ++lag) {
        try {
            out.emplace_back(lag, roc_auc(scores, labels, lag));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::degenerate) {
                throw;
            }
            out.emplace_back(lag, std::nullopt);
        }
    }
    return out;
}

} // namespace epiquery
