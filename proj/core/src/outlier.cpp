#include "epiquery/outlier.hpp"

#include <algorithm>
#include <cmath>

#include "epiquery/error.hpp"

namespace epiquery {

double percentile_linear(std::vector<double> values, double percentile) {
    if (values.empty()) {
        throw Error(ErrorKind::degenerate, "percentile of an empty sample");
    }
    if (!(percentile >= 0.0 && percentile <= 100.0)) {
        throw Error(ErrorKind::config, "percentile must be in [0, 100]");
    }
    std::sort(values.begin(), values.end());
    double h = (static_cast<double>(values.size()) - 1.0) * percentile / 100.0;
    std::size_t lo = static_cast<std::size_t>(h);
    double frac = h - static_cast<double>(lo);
    if (lo + 1 >= values.size()) {
        return values.back();
    }
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

OutlierFrame outlier_measure(const Panel& panel,
                             const std::map<std::string, ControlModel>& models, Week week_next) {
    OutlierFrame frame(week_next);
    frame.n_keywords = panel.n_keywords();
    for (const auto& [target_id, model] : models) {
        if (model.week_fitted.next() != week_next) {
            throw Error(ErrorKind::input,
                        "model for '" + target_id + "' was fitted at week " +
                            model.week_fitted.str() + ", not the week before " +
                            week_next.str());
        }
        if (!panel.has(week_next, target_id)) {
            frame.exclusions[target_id] = "target has no data at prediction week";
            continue;
        }
        std::vector<double> predicted;
        try {
            predicted = predict(model, panel, week_next);
        } catch (const Error& e) {
            frame.exclusions[target_id] = e.what();
            continue;
        }
        std::vector<double> actual = panel.fractions(week_next, target_id);
        std::vector<double> d(actual.size());
        for (std::size_t k = 0; k < d.size(); ++k) {
            d[k] = actual[k] - predicted[k];
        }
        frame.raw.emplace(target_id, std::move(d));
        frame.included_areas.push_back(target_id);
    }
    return frame;
}

OutlierFrame standardize(OutlierFrame frame) {
    frame.standardized.clear();
    frame.zero_variance_keywords.clear();
    for (const std::string& id : frame.included_areas) {
        frame.standardized.emplace(id, std::vector<double>(frame.n_keywords, 0.0));
    }
    const std::size_t n = frame.included_areas.size();
    if (n == 0) {
        return frame;
    }
    for (std::size_t k = 0; k < frame.n_keywords; ++k) {
        double lo = frame.raw.at(frame.included_areas.front())[k];
        double hi = lo;
        double sum = 0.0;
        for (const std::string& id : frame.included_areas) {
            double v = frame.raw.at(id)[k];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            sum += v;
        }
        double mean = sum / static_cast<double>(n);
        double ss = 0.0;
        for (const std::string& id : frame.included_areas) {
            double dev = frame.raw.at(id)[k] - mean;
            ss += dev * dev;
        }
        double sd = std::sqrt(ss / static_cast<double>(n));
        if (lo == hi || sd == 0.0) {
            frame.zero_variance_keywords.push_back(k);
            continue; // column stays all zeros
        }
        for (const std::string& id : frame.included_areas) {
            frame.standardized.at(id)[k] = (frame.raw.at(id)[k] - mean) / sd;
        }
    }
    return frame;
}

OutlierFrame composite_signal(OutlierFrame frame,
                              std::pair<std::size_t, std::size_t> keyword_pair) {
    if (keyword_pair.first >= frame.n_keywords || keyword_pair.second >= frame.n_keywords) {
        throw Error(ErrorKind::config, "composite keyword index out of range");
    }
    frame.composite_keywords = keyword_pair;
    frame.composite.clear();
    frame.composite_omitted.clear();
    for (const std::string& id : frame.included_areas) {
        auto it = frame.standardized.find(id);
        if (it == frame.standardized.end() || it->second.size() != frame.n_keywords) {
            frame.composite_omitted.push_back(id);
            continue;
        }
        frame.composite[id] = it->second[keyword_pair.first] * it->second[keyword_pair.second];
    }
    return frame;
}

AlertReport alert_threshold(const OutlierFrame& frame, double percentile) {
    AlertReport report(frame.week);
    report.percentile = percentile;
    report.n_areas_covered = frame.included_areas.size();

    std::vector<double> pool;
    pool.reserve(frame.included_areas.size() * frame.n_keywords);
    for (const std::string& id : frame.included_areas) {
        const std::vector<double>& z = frame.standardized.at(id);
        for (std::size_t k = 0; k < z.size(); ++k) {
            if (k == frame.composite_keywords.first || k == frame.composite_keywords.second) {
                continue;
            }
            pool.push_back(z[k]);
        }
    }
    if (pool.empty()) {
        throw Error(ErrorKind::degenerate,
                    "empty reference pool for alert threshold in week " + frame.week.str());
    }
    report.threshold = percentile_linear(std::move(pool), percentile);

    for (const auto& [id, value] : frame.composite) {
        if (value > report.threshold) {
            const std::vector<double>& z = frame.standardized.at(id);
            bool both_negative = z[frame.composite_keywords.first] < 0.0 &&
                                 z[frame.composite_keywords.second] < 0.0;
            report.alerts.push_back({id, value, report.threshold, both_negative});
        }
    }
    std::sort(report.alerts.begin(), report.alerts.end(), [](const Alert& a, const Alert& b) {
        if (a.composite != b.composite) {
            return a.composite > b.composite;
        }
        return a.area_id < b.area_id;
    });
    return report;
}

DetectionRun weekly_run(const Panel& panel, const AreaTable& areas, Week week,
                        const EpiSeries* cases, const DetectionParams& params) {
    Week next = week.next();
    DetectionRun run;
    run.week_fitted = week;
    run.week_predicted = next;

    const KeywordRegistry& registry = panel.registry();
    std::size_t kw1 = registry.index_of(params.composite_pair.first);
    std::size_t kw2 = registry.index_of(params.composite_pair.second);

    std::vector<std::string> at_week = panel.area_ids(week);
    if (at_week.empty()) {
        throw Error(ErrorKind::degenerate, "panel has no data in week " + week.str());
    }
    if (panel.area_ids(next).empty()) {
        throw Error(ErrorKind::degenerate, "panel has no data in week " + next.str());
    }

    for (const std::string& id : at_week) {
        try {
            run.models.emplace(id, greedy_select(panel, areas, week, id, params.match));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::degenerate) {
                throw;
            }
            run.unmodeled.emplace(id, e.what());
        }
    }
    if (run.models.empty()) {
        std::string detail = run.unmodeled.empty() ? "" : "; " + run.unmodeled.begin()->second;
        throw Error(ErrorKind::degenerate,
                    "no area could be modeled at week " + week.str() + detail);
    }

    run.frame = composite_signal(standardize(outlier_measure(panel, run.models, next)),
                                 {kw1, kw2});
    run.alerts = alert_threshold(run.frame, params.alert_percentile);
    run.n_areas_with_data = run.frame.included_areas.size();

    std::vector<std::size_t> sd_keywords;
    for (const std::string& name : params.over_sd_keywords) {
        sd_keywords.push_back(registry.index_of(name));
    }
    for (const std::string& id : run.frame.included_areas) {
        const std::vector<double>& z = run.frame.standardized.at(id);
        for (std::size_t k : sd_keywords) {
            if (z[k] > params.over_sd_threshold) {
                ++run.n_over_sd;
                break;
            }
        }
    }

    if (cases != nullptr) {
        std::size_t rises = 0;
        for (const auto& [id, weeks] : cases->weekly()) {
            auto prev = weeks.find(week);
            auto cur = weeks.find(next);
            if (prev == weeks.end() || cur == weeks.end()) {
                continue;
            }
            if (prev->second > 0.0 && cur->second >= params.case_rise_ratio * prev->second) {
                ++rises;
            }
        }
        run.n_case_rises = rises;
    }
    return run;
}

} // namespace epiquery
