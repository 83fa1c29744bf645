#include "epiquery/matching.hpp"

#include <utility>

#include "epiquery/error.hpp"

namespace epiquery {

ControlModel greedy_select(const Panel& panel, const AreaTable& areas, Week week,
                           const std::string& target_id, const MatchParams& params) {
    if (params.max_controls < 1) {
        throw Error(ErrorKind::config, "max_controls must be at least 1");
    }
    if (!panel.has(week, target_id)) {
        throw Error(ErrorKind::degenerate,
                    "target area '" + target_id + "' has no data in week " + week.str());
    }
    const Area& target = areas.at(target_id);
    std::vector<double> y = panel.fractions(week, target_id);

    // Candidates present this week and far enough away, in id order.
    std::vector<std::pair<std::string, std::vector<double>>> candidates;
    for (const std::string& id : panel.area_ids(week)) {
        if (id == target_id) {
            continue;
        }
        if (distance_km(target, areas.at(id)) < params.min_distance_km) {
            continue;
        }
        candidates.emplace_back(id, panel.fractions(week, id));
    }
    if (candidates.empty()) {
        throw Error(ErrorKind::degenerate,
                    "no eligible control candidates for '" + target_id + "' in week " +
                        week.str() + " (need an area with data at least " +
                        std::to_string(params.min_distance_km) + " km away)");
    }

    ControlModel model;
    model.target_id = target_id;
    model.week_fitted = week;

    std::vector<std::vector<double>> selected_cols;
    LinearFit current;
    while (static_cast<int>(model.control_ids.size()) < params.max_controls &&
           !candidates.empty()) {
        std::size_t best = candidates.size();
        LinearFit best_fit;
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            selected_cols.push_back(candidates[c].second);
            LinearFit fit = fit_linear(selected_cols, y);
            selected_cols.pop_back();
            if (best == candidates.size() || fit.r2 > best_fit.r2) {
                best = c;
                best_fit = fit;
            }
        }
        model.control_ids.push_back(candidates[best].first);
        selected_cols.push_back(std::move(candidates[best].second));
        candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(best));
        model.r2_path.push_back(best_fit.r2);
        current = std::move(best_fit);
    }

    model.coefficients = current.coefficients;
    model.intercept = current.intercept;
    model.r2 = current.r2;
    model.rank_deficient = current.rank_deficient;
    model.short_model = static_cast<int>(model.control_ids.size()) < params.max_controls;
    return model;
}

std::vector<double> predict(const ControlModel& model, const Panel& panel, Week week) {
    std::vector<double> out(panel.n_keywords(), model.intercept);
    for (std::size_t j = 0; j < model.control_ids.size(); ++j) {
        const std::string& id = model.control_ids[j];
        if (!panel.has(week, id)) {
            throw Error(ErrorKind::degenerate,
                        "control area '" + id + "' (for target '" + model.target_id +
                            "') has no data in week " + week.str());
        }
        std::vector<double> f = panel.fractions(week, id);
        for (std::size_t k = 0; k < out.size(); ++k) {
            out[k] += model.coefficients[j] * f[k];
        }
    }
    return out;
}

} // namespace epiquery
