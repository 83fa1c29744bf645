#include "epiquery/json_io.hpp"

#include <fstream>

#include "epiquery/error.hpp"

namespace epiquery {

using nlohmann::json;

json to_json(const ControlModel& model) {
    return json{{"target", model.target_id},
                {"week_fitted", model.week_fitted.str()},
                {"controls", model.control_ids},
                {"coefficients", model.coefficients},
                {"intercept", model.intercept},
                {"r2", model.r2},
                {"r2_path", model.r2_path},
                {"flags",
                 {{"rank_deficient", model.rank_deficient}, {"short_model", model.short_model}}}};
}

ControlModel control_model_from_json(const json& j) {
    ControlModel model;
    model.target_id = j.at("target").get<std::string>();
    model.week_fitted = Week::parse(j.at("week_fitted").get<std::string>());
    model.control_ids = j.at("controls").get<std::vector<std::string>>();
    model.coefficients = j.at("coefficients").get<std::vector<double>>();
    model.intercept = j.at("intercept").get<double>();
    model.r2 = j.at("r2").get<double>();
    model.r2_path = j.at("r2_path").get<std::vector<double>>();
    model.rank_deficient = j.at("flags").at("rank_deficient").get<bool>();
    model.short_model = j.at("flags").at("short_model").get<bool>();
    if (model.coefficients.size() != model.control_ids.size()) {
        throw Error(ErrorKind::input, "control model: coefficients do not match controls");
    }
    return model;
}

json to_json(const OutlierFrame& frame, const KeywordRegistry& registry) {
    json raw = json::object();
    json standardized = json::object();
    for (const std::string& id : frame.included_areas) {
        raw[id] = frame.raw.at(id);
        standardized[id] = frame.standardized.at(id);
    }
    json zero_variance = json::array();
    for (std::size_t k : frame.zero_variance_keywords) {
        zero_variance.push_back(registry.at(k).canonical);
    }
    return json{{"week", frame.week.str()},
                {"keywords", [&] {
                     std::vector<std::string> names;
                     for (std::size_t k = 0; k < registry.size(); ++k) {
                         names.push_back(registry.at(k).canonical);
                     }
                     return names;
                 }()},
                {"included_areas", frame.included_areas},
                {"raw", std::move(raw)},
                {"standardized", std::move(standardized)},
                {"composite", frame.composite},
                {"composite_keywords",
                 {registry.at(frame.composite_keywords.first).canonical,
                  registry.at(frame.composite_keywords.second).canonical}},
                {"composite_omitted", frame.composite_omitted},
                {"zero_variance_keywords", std::move(zero_variance)},
                {"exclusions", frame.exclusions}};
}

json to_json(const AlertReport& report) {
    json alerts = json::array();
    for (const Alert& a : report.alerts) {
        alerts.push_back({{"area_id", a.area_id},
                          {"composite", a.composite},
                          {"threshold", a.threshold},
                          {"both_negative", a.both_negative}});
    }
    return json{{"week", report.week.str()},
                {"percentile", report.percentile},
                {"threshold", report.threshold},
                {"n_areas_covered", report.n_areas_covered},
                {"alerts", std::move(alerts)}};
}

json to_json(const DetectionRun& run, const KeywordRegistry& registry) {
    json models = json::object();
    for (const auto& [id, model] : run.models) {
        models[id] = to_json(model);
    }
    json counters{{"n_areas_with_data", run.n_areas_with_data},
                  {"n_over_sd", run.n_over_sd},
                  {"coverage_lost", run.frame.exclusions}};
    if (run.n_case_rises) {
        counters["n_case_rises"] = *run.n_case_rises;
    } else {
        counters["n_case_rises"] = nullptr;
    }
    return json{{"week_fitted", run.week_fitted.str()},
                {"week_predicted", run.week_predicted.str()},
                {"models", std::move(models)},
                {"outliers", to_json(run.frame, registry)},
                {"alerts", to_json(run.alerts)},
                {"unmodeled", run.unmodeled},
                {"counters", std::move(counters)}};
}

RunSummary run_summary_from_json(const json& j) {
    RunSummary summary;
    summary.week_fitted = Week::parse(j.at("week_fitted").get<std::string>());
    summary.week_predicted = Week::parse(j.at("week_predicted").get<std::string>());
    summary.composite =
        j.at("outliers").at("composite").get<std::map<std::string, double>>();
    const json& counters = j.at("counters");
    summary.n_areas_with_data = counters.at("n_areas_with_data").get<std::size_t>();
    summary.n_over_sd = counters.at("n_over_sd").get<std::size_t>();
    if (!counters.at("n_case_rises").is_null()) {
        summary.n_case_rises = counters.at("n_case_rises").get<std::size_t>();
    }
    return summary;
}

json to_json(const Scenario& sc) {
    json search = json::object();
    for (const auto& [name, cp] : sc.search) {
        search[name] = {{"baseline", cp.baseline},
                        {"gain", cp.gain},
                        {"lag_days", cp.lag_days},
                        {"noise_sd", cp.noise_sd}};
    }
    json injections = json::array();
    for (const Injection& inj : sc.injections) {
        injections.push_back({{"area_id", inj.area_id},
                              {"week_start", inj.week.str()},
                              {"keyword", inj.keyword},
                              {"excess", inj.excess}});
    }
    return json{{"seed", sc.seed},
                {"n_areas", sc.n_areas},
                {"n_weeks", sc.n_weeks},
                {"start", format_date(sc.start)},
                {"geography",
                 {{"lat_lo", sc.geography.lat_lo},
                  {"lat_hi", sc.geography.lat_hi},
                  {"lon_lo", sc.geography.lon_lo},
                  {"lon_hi", sc.geography.lon_hi},
                  {"min_spacing_km", sc.geography.min_spacing_km}}},
                {"onset_week_lo", sc.onset_week_lo},
                {"onset_week_hi", sc.onset_week_hi},
                {"growth_lo", sc.growth_lo},
                {"growth_hi", sc.growth_hi},
                {"peak_lo", sc.peak_lo},
                {"peak_hi", sc.peak_hi},
                {"baseline_daily_cases", sc.baseline_daily_cases},
                {"observation_noise", sc.observation_noise},
                {"search", std::move(search)},
                {"default_baseline", sc.default_baseline},
                {"default_noise_sd", sc.default_noise_sd},
                {"total_users_lo", sc.total_users_lo},
                {"total_users_hi", sc.total_users_hi},
                {"injections", std::move(injections)},
                {"mortality_cfr", sc.mortality_cfr},
                {"mortality_lag_weeks", sc.mortality_lag_weeks}};
}

Scenario scenario_from_json(const json& j) {
    Scenario sc;
    try {
        if (j.contains("seed")) sc.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("n_areas")) sc.n_areas = j.at("n_areas").get<int>();
        if (j.contains("n_weeks")) sc.n_weeks = j.at("n_weeks").get<int>();
        if (j.contains("start")) sc.start = parse_date(j.at("start").get<std::string>());
        if (j.contains("geography")) {
            const json& g = j.at("geography");
            if (g.contains("lat_lo")) sc.geography.lat_lo = g.at("lat_lo").get<double>();
            if (g.contains("lat_hi")) sc.geography.lat_hi = g.at("lat_hi").get<double>();
            if (g.contains("lon_lo")) sc.geography.lon_lo = g.at("lon_lo").get<double>();
            if (g.contains("lon_hi")) sc.geography.lon_hi = g.at("lon_hi").get<double>();
            if (g.contains("min_spacing_km")) {
                sc.geography.min_spacing_km = g.at("min_spacing_km").get<double>();
            }
        }
        if (j.contains("onset_week_lo")) sc.onset_week_lo = j.at("onset_week_lo").get<double>();
        if (j.contains("onset_week_hi")) sc.onset_week_hi = j.at("onset_week_hi").get<double>();
        if (j.contains("growth_lo")) sc.growth_lo = j.at("growth_lo").get<double>();
        if (j.contains("growth_hi")) sc.growth_hi = j.at("growth_hi").get<double>();
        if (j.contains("peak_lo")) sc.peak_lo = j.at("peak_lo").get<double>();
        if (j.contains("peak_hi")) sc.peak_hi = j.at("peak_hi").get<double>();
        if (j.contains("baseline_daily_cases")) {
            sc.baseline_daily_cases = j.at("baseline_daily_cases").get<double>();
        }
        if (j.contains("observation_noise")) {
            sc.observation_noise = j.at("observation_noise").get<bool>();
        }
        if (j.contains("search")) {
            sc.search.clear();
            for (const auto& [name, c] : j.at("search").items()) {
                SearchCoupling cp;
                if (c.contains("baseline")) cp.baseline = c.at("baseline").get<double>();
                if (c.contains("gain")) cp.gain = c.at("gain").get<double>();
                if (c.contains("lag_days")) cp.lag_days = c.at("lag_days").get<int>();
                if (c.contains("noise_sd")) cp.noise_sd = c.at("noise_sd").get<double>();
                sc.search.emplace(name, cp);
            }
        }
        if (j.contains("default_baseline")) {
            sc.default_baseline = j.at("default_baseline").get<double>();
        }
        if (j.contains("default_noise_sd")) {
            sc.default_noise_sd = j.at("default_noise_sd").get<double>();
        }
        if (j.contains("total_users_lo")) {
            sc.total_users_lo = j.at("total_users_lo").get<std::uint64_t>();
        }
        if (j.contains("total_users_hi")) {
            sc.total_users_hi = j.at("total_users_hi").get<std::uint64_t>();
        }
        if (j.contains("injections")) {
            for (const json& inj : j.at("injections")) {
                sc.injections.emplace_back(inj.at("area_id").get<std::string>(),
                                           Week::parse(inj.at("week_start").get<std::string>()),
                                           inj.at("keyword").get<std::string>(),
                                           inj.at("excess").get<double>());
            }
        }
        if (j.contains("mortality_cfr")) sc.mortality_cfr = j.at("mortality_cfr").get<double>();
        if (j.contains("mortality_lag_weeks")) {
            sc.mortality_lag_weeks = j.at("mortality_lag_weeks").get<int>();
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::config, std::string("bad scenario: ") + e.what());
    }
    return sc;
}

json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::input, "cannot open '" + path.string() + "'");
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::input, path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorKind::input, "cannot write '" + path.string() + "'");
    }
    out << j.dump(2) << '\n';
}

} // namespace epiquery
