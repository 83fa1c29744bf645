#pragma once

#include <string>
#include <vector>

#include "epiquery/geo.hpp"
#include "epiquery/linear_fit.hpp"
#include "epiquery/panel.hpp"
#include "epiquery/week.hpp"

namespace epiquery {

struct MatchParams {
    int max_controls = 5;
    double min_distance_km = 50.0;
};

/// A fitted control-area model: the target's keyword-rate vector expressed as
/// an affine function of the same-week vectors of a few distant areas.
struct ControlModel {
    std::string target_id;
    Week week_fitted;
    std::vector<std::string> control_ids;  // in greedy selection order
    std::vector<double> coefficients;      // aligned with control_ids
    double intercept = 0.0;
    double r2 = 0.0;
    std::vector<double> r2_path;           // in-sample R^2 after each addition
    bool rank_deficient = false;
    bool short_model = false;              // fewer eligible candidates than max_controls
};

/// Greedy forward selection: repeatedly adds the eligible area (present in
/// `week`, at least `min_distance_km` from the target) whose addition
/// maximizes the in-sample R^2 of the least-squares fit across all registered
/// keywords. Ties break to the lexicographically smallest area id. Throws a
/// degenerate-data error when no candidate is eligible.
ControlModel greedy_select(const Panel& panel, const AreaTable& areas, Week week,
                           const std::string& target_id, const MatchParams& params = {});

/// Applies a fitted model to a week: intercept + sum_j coef_j * F_j. Values
/// are not clamped. Throws naming the first control without data that week.
std::vector<double> predict(const ControlModel& model, const Panel& panel, Week week);

} // namespace epiquery
