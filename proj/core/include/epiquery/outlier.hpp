#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "epiquery/epi_series.hpp"
#include "epiquery/matching.hpp"
#include "epiquery/panel.hpp"

namespace epiquery {

/// Per-week matrix of raw and standardized prediction-error outlier measures
/// plus the two-keyword composite signal.
struct OutlierFrame {
    Week week;                                          // prediction week (w+1)
    std::size_t n_keywords = 0;
    std::vector<std::string> included_areas;            // sorted by id
    std::map<std::string, std::vector<double>> raw;     // area -> actual - predicted, per keyword
    std::map<std::string, std::vector<double>> standardized;
    std::map<std::string, double> composite;
    std::map<std::string, std::string> exclusions;      // area -> reason the model could not apply
    std::vector<std::size_t> zero_variance_keywords;
    std::pair<std::size_t, std::size_t> composite_keywords{0, 0};
    std::vector<std::string> composite_omitted;         // areas lacking either factor

    OutlierFrame() = default;
    explicit OutlierFrame(Week w) : week(w) {}
};

struct Alert {
    std::string area_id;
    double composite = 0.0;
    double threshold = 0.0;
    bool both_negative = false; // both standardized factors were negative
};

struct AlertReport {
    Week week;
    double percentile = 95.0;
    double threshold = 0.0;
    std::vector<Alert> alerts;     // composite strictly above threshold, largest first
    std::size_t n_areas_covered = 0;

    AlertReport() = default;
    explicit AlertReport(Week w) : week(w) {}
};

/// Percentile of a sample with linear interpolation between order statistics.
double percentile_linear(std::vector<double> values, double percentile);

/// Raw outlier measures at `week_next` for every model that can be applied:
/// actual minus predicted fraction per keyword. Models fitted at any week
/// other than the predecessor of `week_next` are an error; areas whose target
/// or controls lack data at `week_next` are excluded and listed.
OutlierFrame outlier_measure(const Panel& panel,
                             const std::map<std::string, ControlModel>& models, Week week_next);

/// Standardizes each keyword column to zero mean and unit variance across the
/// included areas (population standard deviation). Zero-variance keywords
/// standardize to all zeros and are flagged.
OutlierFrame standardize(OutlierFrame frame);

/// Fills the composite signal: the product of the two keywords' standardized
/// values per area.
OutlierFrame composite_signal(OutlierFrame frame,
                              std::pair<std::size_t, std::size_t> keyword_pair);

/// Alerting rule: the threshold is the given percentile of the standardized
/// values of every keyword except the composite pair, pooled across included
/// areas; alerted areas have composite strictly above it.
AlertReport alert_threshold(const OutlierFrame& frame, double percentile = 95.0);

struct DetectionParams {
    MatchParams match;
    double alert_percentile = 95.0;
    std::pair<std::string, std::string> composite_pair{"pyrexia", "cough"};
    std::vector<std::string> over_sd_keywords{"pyrexia", "cough"}; // counted if either exceeds
    double over_sd_threshold = 2.0;
    double case_rise_ratio = 2.5;
};

/// One week pair's full detection output.
struct DetectionRun {
    Week week_fitted;
    Week week_predicted;
    std::map<std::string, ControlModel> models;
    OutlierFrame frame;
    AlertReport alerts;
    std::map<std::string, std::string> unmodeled; // present at w but not modelable
    std::size_t n_areas_with_data = 0;            // areas with a prediction at w+1
    std::size_t n_over_sd = 0;                    // standardized signal above over_sd_threshold
    std::optional<std::size_t> n_case_rises;      // weekly case count rose >= case_rise_ratio
};

/// Fits control models at `week`, scores the following week, standardizes,
/// builds the composite and alert report, and fills the coverage counters.
/// `cases` is optional; without it the case-rise counter is absent.
DetectionRun weekly_run(const Panel& panel, const AreaTable& areas, Week week,
                        const EpiSeries* cases = nullptr, const DetectionParams& params = {});

} // namespace epiquery
