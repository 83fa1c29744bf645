#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "epiquery/epi_series.hpp"
#include "epiquery/keywords.hpp"
#include "epiquery/panel.hpp"
#include "epiquery/week.hpp"

namespace epiquery {

/// Consecutive daily values; day i falls on start + i.
struct DailySeries {
    Date start;
    std::vector<double> values;

    DailySeries() : start(Date{}) {}
    DailySeries(Date s, std::vector<double> v) : start(s), values(std::move(v)) {}
    bool operator==(const DailySeries&) const = default;
};

/// Centered moving average; edges use the mean of the available values.
std::vector<double> moving_average(const std::vector<double>& series, int window = 7);
DailySeries moving_average(const DailySeries& series, int window = 7);

/// Daily view of an epi series (gaps filled with zeros).
DailySeries to_daily(const EpiSeries& series, const std::string& area_id);

/// Daily step series of one keyword's weekly fraction (each day of a week
/// carries that week's value; absent weeks are zero).
DailySeries panel_daily_fractions(const Panel& panel, const std::string& area_id,
                                  std::size_t keyword_idx);

struct LagParams {
    int lag_min_days = -35;
    int lag_max_days = 35;
    int min_overlap_days = 30;
    int smoothing_window = 7;
};

/// Best-lag cross-correlation result. A positive lag means the search series
/// leads: search at day t is paired with cases at day t + lag.
struct LagResult {
    int best_lag_days = 0;
    double best_correlation = 0.0;
    std::map<int, double> correlogram; // only lags with a defined correlation
};

/// Pearson correlation over the overlapping support at every lag in range;
/// returns the maximizing lag (smallest lag on ties). Lags with too little
/// overlap or zero variance are skipped; all-skipped is an error. Pass
/// pre-smoothed series.
LagResult best_lag_correlation(const DailySeries& search, const DailySeries& cases,
                               const LagParams& params = {});

/// keyword index -> area id -> daily fraction series.
using DailySearch = std::map<std::size_t, std::map<std::string, DailySeries>>;

DailySearch daily_search_from_panel(const Panel& panel);
DailySearch load_daily_search_csv(const std::filesystem::path& path,
                                  const KeywordRegistry& registry);
void write_daily_search_csv(const std::filesystem::path& path, const DailySearch& search,
                            const KeywordRegistry& registry);

struct LagTableRow {
    std::string keyword;
    double median_correlation = 0.0;
    int median_lag_days = 0;
    std::size_t n_areas = 0;
};

/// Per-keyword medians across areas of the best-lag correlation against the
/// case series (both sides smoothed first). Keywords with no valid area are
/// omitted. Even-count medians: mean of the middle pair for correlations,
/// lower-middle element for lags.
std::vector<LagTableRow> median_lag_table(const DailySearch& search, const EpiSeries& cases,
                                          const KeywordRegistry& registry,
                                          const LagParams& params = {});

enum class JumpRule {
    sd,    // week-over-week difference above a multiple of historical SD
    ratio, // week-over-week multiplicative rise
};

enum class SdBaseline {
    per_area_history, // SD of the area's past week-over-week differences
    cross_area_week,  // SD of this week's differences across areas
};

struct JumpParams {
    double sd_multiplier = 2.0;
    double ratio = 2.5;
    SdBaseline sd_baseline = SdBaseline::per_area_history;
};

/// Binary week-over-week jump labels. Weeks without the history the rule
/// needs are left unlabeled and are excluded from ROC pairing.
struct JumpLabels {
    JumpRule rule = JumpRule::ratio;
    JumpParams params;
    std::map<std::pair<std::string, Week>, bool> labels;

    bool defined(const std::string& area_id, Week week) const {
        return labels.count({area_id, week}) != 0;
    }
    bool at(const std::string& area_id, Week week) const {
        return labels.at({area_id, week});
    }
};

JumpLabels label_jumps(const WeeklyCounts& weekly, JumpRule rule, const JumpParams& params = {});

/// Anomaly scores keyed by (area, week the score refers to).
using ScoreMap = std::map<std::pair<std::string, Week>, double>;

struct RocResult {
    double auc = 0.0;
    std::vector<std::pair<double, double>> roc_points; // (FPR, TPR), (0,0) .. (1,1)
    std::size_t n_pos = 0;
    std::size_t n_neg = 0;
    int lag_weeks = 0;
};

/// Pairs the score at week w with the label at week w + lag and computes the
/// AUC by Mann-Whitney rank counting (ties count half) plus the swept ROC
/// curve; the two routes are cross-checked to 1e-9. Throws when either class
/// is empty after pairing.
RocResult roc_auc(const ScoreMap& scores, const JumpLabels& labels, int lag_weeks);

/// roc_auc swept over a lag range; lags whose pairing is degenerate are
/// reported as absent rather than failing the sweep.
std::vector<std::pair<int, std::optional<RocResult>>>
auc_vs_lag(const ScoreMap& scores, const JumpLabels& labels, int lag_lo_weeks, int lag_hi_weeks);

} // namespace epiquery
