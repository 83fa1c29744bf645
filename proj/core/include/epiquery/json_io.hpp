#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "epiquery/matching.hpp"
#include "epiquery/outlier.hpp"
#include "epiquery/synthgen.hpp"

namespace epiquery {

nlohmann::json to_json(const ControlModel& model);
ControlModel control_model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const OutlierFrame& frame, const KeywordRegistry& registry);
nlohmann::json to_json(const AlertReport& report);
nlohmann::json to_json(const DetectionRun& run, const KeywordRegistry& registry);

/// The slice of a stored detection run that evaluation needs.
struct RunSummary {
    Week week_fitted;
    Week week_predicted;
    std::map<std::string, double> composite;
    std::size_t n_areas_with_data = 0;
    std::size_t n_over_sd = 0;
    std::optional<std::size_t> n_case_rises;
};

RunSummary run_summary_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Scenario& scenario);
Scenario scenario_from_json(const nlohmann::json& j);

nlohmann::json load_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

} // namespace epiquery
