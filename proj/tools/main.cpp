// epiquery: regional outbreak-signal detection from search-query panels.
// Subcommands: synth, detect, evaluate, report.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "epiquery/csv.hpp"
#include "epiquery/epi_series.hpp"
#include "epiquery/error.hpp"
#include "epiquery/evaluation.hpp"
#include "epiquery/geo.hpp"
#include "epiquery/json_io.hpp"
#include "epiquery/outlier.hpp"
#include "epiquery/panel.hpp"
#include "epiquery/synthgen.hpp"
#include "svg_plot.hpp"

namespace fs = std::filesystem;
using namespace epiquery;

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct CliConfig {
    // input paths
    std::string panel, areas, cases, mortality, daily_search, runs;
    std::string output_dir;
    // thresholds, defaulted to the standard analysis constants
    std::uint64_t min_area_users = 10000;
    std::uint64_t min_cell_users = 10;
    double min_distance_km = 50.0;
    int max_controls = 5;
    double alert_percentile = 95.0;
    double sd_multiplier = 2.0;
    double ratio = 2.5;
    double over_sd = 2.0;
    std::vector<std::string> composite_pair{"pyrexia", "cough"};
    int lag_days_lo = -35, lag_days_hi = 35;
    int lag_weeks_lo = -4, lag_weeks_hi = 8;
    std::string jump_rule = "ratio"; // "ratio" | "sd"
    std::string sd_baseline = "per_area_history";
    std::string start_week; // empty: analyze every week pair
    bool plots = false;
    bool emit_daily_search = true;
    Scenario scenario;
};

void apply_config_file(CliConfig& c, const fs::path& path) {
    nlohmann::json j = load_json_file(path);
    try {
        if (j.contains("paths")) {
            const auto& p = j.at("paths");
            if (p.contains("panel")) c.panel = p.at("panel").get<std::string>();
            if (p.contains("areas")) c.areas = p.at("areas").get<std::string>();
            if (p.contains("cases")) c.cases = p.at("cases").get<std::string>();
            if (p.contains("mortality")) c.mortality = p.at("mortality").get<std::string>();
            if (p.contains("daily_search")) {
                c.daily_search = p.at("daily_search").get<std::string>();
            }
            if (p.contains("runs")) c.runs = p.at("runs").get<std::string>();
        }
        if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
        if (j.contains("thresholds")) {
            const auto& t = j.at("thresholds");
            if (t.contains("min_area_users")) {
                c.min_area_users = t.at("min_area_users").get<std::uint64_t>();
            }
            if (t.contains("min_cell_users")) {
                c.min_cell_users = t.at("min_cell_users").get<std::uint64_t>();
            }
            if (t.contains("min_distance_km")) {
                c.min_distance_km = t.at("min_distance_km").get<double>();
            }
            if (t.contains("max_controls")) c.max_controls = t.at("max_controls").get<int>();
            if (t.contains("alert_percentile")) {
                c.alert_percentile = t.at("alert_percentile").get<double>();
            }
            if (t.contains("sd_multiplier")) {
                c.sd_multiplier = t.at("sd_multiplier").get<double>();
            }
            if (t.contains("ratio")) c.ratio = t.at("ratio").get<double>();
            if (t.contains("over_sd")) c.over_sd = t.at("over_sd").get<double>();
        }
        if (j.contains("composite_pair")) {
            c.composite_pair = j.at("composite_pair").get<std::vector<std::string>>();
        }
        if (j.contains("lag_days")) {
            c.lag_days_lo = j.at("lag_days").at(0).get<int>();
            c.lag_days_hi = j.at("lag_days").at(1).get<int>();
        }
        if (j.contains("lag_weeks")) {
            c.lag_weeks_lo = j.at("lag_weeks").at(0).get<int>();
            c.lag_weeks_hi = j.at("lag_weeks").at(1).get<int>();
        }
        if (j.contains("jump_rule")) c.jump_rule = j.at("jump_rule").get<std::string>();
        if (j.contains("sd_baseline")) c.sd_baseline = j.at("sd_baseline").get<std::string>();
        if (j.contains("start_week")) c.start_week = j.at("start_week").get<std::string>();
        if (j.contains("plots")) c.plots = j.at("plots").get<bool>();
        if (j.contains("synth")) c.scenario = scenario_from_json(j.at("synth"));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::config, path.string() + ": " + e.what());
    }
}

void validate_config(const CliConfig& c) {
    const KeywordRegistry& registry = KeywordRegistry::standard();
    if (c.min_area_users == 0 || c.min_cell_users == 0) {
        throw Error(ErrorKind::config, "privacy thresholds must be positive");
    }
    if (c.min_distance_km <= 0.0) {
        throw Error(ErrorKind::config, "min_distance_km must be positive");
    }
    if (c.max_controls < 1) {
        throw Error(ErrorKind::config, "max_controls must be at least 1");
    }
    if (!(c.alert_percentile > 0.0 && c.alert_percentile <= 100.0)) {
        throw Error(ErrorKind::config, "alert_percentile must be in (0, 100]");
    }
    if (c.sd_multiplier <= 0.0 || c.ratio <= 0.0 || c.over_sd <= 0.0) {
        throw Error(ErrorKind::config, "jump-rule thresholds must be positive");
    }
    if (c.composite_pair.size() != 2) {
        throw Error(ErrorKind::config, "composite_pair needs exactly two keywords");
    }
    for (const std::string& kw : c.composite_pair) {
        if (!registry.find(kw)) {
            throw Error(ErrorKind::config, "composite keyword '" + kw + "' is not registered");
        }
    }
    if (c.lag_days_lo > c.lag_days_hi || c.lag_weeks_lo > c.lag_weeks_hi) {
        throw Error(ErrorKind::config, "empty lag range");
    }
    if (c.jump_rule != "ratio" && c.jump_rule != "sd") {
        throw Error(ErrorKind::config, "jump_rule must be 'ratio' or 'sd'");
    }
    if (c.sd_baseline != "per_area_history" && c.sd_baseline != "cross_area_week") {
        throw Error(ErrorKind::config,
                    "sd_baseline must be 'per_area_history' or 'cross_area_week'");
    }
    if (!c.start_week.empty()) {
        Week::parse(c.start_week); // throws when malformed
    }
}

fs::path resolve_output_dir(const CliConfig& c, const std::string& flag_value) {
    // precedence: --out flag, then EPIQUERY_OUT, then config file
    if (!flag_value.empty()) {
        return flag_value;
    }
    if (const char* env = std::getenv("EPIQUERY_OUT"); env != nullptr && *env != '\0') {
        return env;
    }
    if (c.output_dir.empty()) {
        throw Error(ErrorKind::config, "no output directory (use --out or EPIQUERY_OUT)");
    }
    return c.output_dir;
}

DetectionParams detection_params(const CliConfig& c) {
    DetectionParams p;
    p.match.max_controls = c.max_controls;
    p.match.min_distance_km = c.min_distance_km;
    p.alert_percentile = c.alert_percentile;
    p.composite_pair = {c.composite_pair[0], c.composite_pair[1]};
    p.over_sd_keywords = c.composite_pair;
    p.over_sd_threshold = c.over_sd;
    p.case_rise_ratio = c.ratio;
    return p;
}

JumpParams jump_params(const CliConfig& c) {
    JumpParams p;
    p.sd_multiplier = c.sd_multiplier;
    p.ratio = c.ratio;
    p.sd_baseline = c.sd_baseline == "cross_area_week" ? SdBaseline::cross_area_week
                                                       : SdBaseline::per_area_history;
    return p;
}

void write_alerts_csv(const fs::path& path, const AlertReport& report) {
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorKind::input, "cannot write '" + path.string() + "'");
    }
    out << "week_start,area_id,composite,threshold,both_negative_flag\n";
    for (const Alert& a : report.alerts) {
        out << report.week.str() << ',' << a.area_id << ',' << num(a.composite) << ','
            << num(a.threshold) << ',' << (a.both_negative ? 1 : 0) << '\n';
    }
}

int cmd_synth(const CliConfig& config, const fs::path& out_dir) {
    SynthData data = generate(config.scenario);
    fs::create_directories(out_dir);
    data.panel.write_csv(out_dir / "panel.csv");
    data.areas.write_csv(out_dir / "areas.csv");
    data.cases.write_csv(out_dir / "cases.csv");
    data.mortality.write_csv(out_dir / "mortality.csv");
    if (config.emit_daily_search) {
        write_daily_search_csv(out_dir / "search_daily.csv", data.daily_search,
                               KeywordRegistry::standard());
    }
    write_json_file(out_dir / "ground_truth.json", data.ground_truth);
    std::cout << "synth: seed " << config.scenario.seed << ", " << config.scenario.n_areas
              << " areas x " << config.scenario.n_weeks << " weeks -> " << out_dir.string()
              << "\n";
    return 0;
}

int cmd_detect(const CliConfig& config, const fs::path& out_dir) {
    if (config.panel.empty() || config.areas.empty()) {
        throw Error(ErrorKind::config, "detect needs --panel and --areas");
    }
    AreaTable areas = AreaTable::load_csv(config.areas);
    Panel panel = apply_suppression(Panel::load_csv(config.panel), config.min_area_users,
                                    config.min_cell_users);
    std::optional<EpiSeries> cases;
    if (!config.cases.empty()) {
        cases = EpiSeries::load_cases_csv(config.cases);
    }
    DetectionParams params = detection_params(config);

    std::vector<Week> weeks = panel.weeks();
    std::vector<Week> fit_weeks;
    for (const Week& w : weeks) {
        if (!config.start_week.empty() && w < Week::parse(config.start_week)) {
            continue;
        }
        if (std::find(weeks.begin(), weeks.end(), w.next()) != weeks.end()) {
            fit_weeks.push_back(w);
        }
    }
    if (fit_weeks.empty()) {
        throw Error(ErrorKind::degenerate, "no analyzable week pairs");
    }

    fs::create_directories(out_dir);
    int written = 0;
    for (const Week& w : fit_weeks) {
        DetectionRun run;
        try {
            run = weekly_run(panel, areas, w, cases ? &*cases : nullptr, params);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::degenerate) {
                throw;
            }
            std::cerr << "warning: skipping week " << w.str() << ": " << e.what() << "\n";
            continue;
        }
        write_json_file(out_dir / ("run_" + run.week_predicted.str() + ".json"),
                        to_json(run, panel.registry()));
        write_alerts_csv(out_dir / ("alerts_" + run.week_predicted.str() + ".csv"),
                         run.alerts);
        ++written;
        for (const auto& [id, reason] : run.frame.exclusions) {
            std::cerr << "warning: week " << run.week_predicted.str() << ": coverage lost for "
                      << id << " (" << reason << ")\n";
        }
    }
    if (written == 0) {
        throw Error(ErrorKind::degenerate, "no analyzable week pairs");
    }
    std::cout << "detect: wrote " << written << " weekly runs to " << out_dir.string() << "\n";
    return 0;
}

std::pair<std::size_t, std::size_t> count_pairs(const ScoreMap& scores,
                                                const JumpLabels& labels, int lag) {
    std::size_t n_pos = 0, n_neg = 0;
    for (const auto& [key, score] : scores) {
        Week label_week = shift_weeks(key.second, lag);
        if (!labels.defined(key.first, label_week)) {
            continue;
        }
        (labels.at(key.first, label_week) ? n_pos : n_neg) += 1;
    }
    return {n_pos, n_neg};
}

void write_auc_sweep_csv(const fs::path& path, const ScoreMap& scores,
                         const JumpLabels& labels,
                         const std::vector<std::pair<int, std::optional<RocResult>>>& sweep) {
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorKind::input, "cannot write '" + path.string() + "'");
    }
    out << "lag,auc,n_pos,n_neg\n";
    for (const auto& [lag, result] : sweep) {
        if (result) {
            out << lag << ',' << num(result->auc) << ',' << result->n_pos << ','
                << result->n_neg << '\n';
        } else {
            auto [n_pos, n_neg] = count_pairs(scores, labels, lag);
            out << lag << ",undefined," << n_pos << ',' << n_neg << '\n';
        }
    }
}

svg::Series sweep_series(const std::vector<std::pair<int, std::optional<RocResult>>>& sweep,
                         const std::string& label, const std::string& color) {
    svg::Series s;
    s.label = label;
    s.color = color;
    s.markers = true;
    for (const auto& [lag, result] : sweep) {
        if (result) {
            s.points.emplace_back(lag, result->auc);
        }
    }
    return s;
}

int cmd_evaluate(const CliConfig& config, const fs::path& out_dir) {
    if (config.runs.empty()) {
        throw Error(ErrorKind::config, "evaluate needs --runs");
    }
    if (config.cases.empty()) {
        throw Error(ErrorKind::config, "evaluate needs --cases");
    }
    if (!fs::is_directory(config.runs)) {
        throw Error(ErrorKind::input, "runs directory '" + config.runs + "' does not exist");
    }
    std::vector<fs::path> run_files;
    for (const auto& entry : fs::directory_iterator(config.runs)) {
        std::string name = entry.path().filename().string();
        if (name.rfind("run_", 0) == 0 && entry.path().extension() == ".json") {
            run_files.push_back(entry.path());
        }
    }
    std::sort(run_files.begin(), run_files.end());
    if (run_files.empty()) {
        throw Error(ErrorKind::input,
                    "no detection runs (run_*.json) found in '" + config.runs + "'");
    }
    std::vector<RunSummary> runs;
    for (const fs::path& p : run_files) {
        runs.push_back(run_summary_from_json(load_json_file(p)));
    }

    ScoreMap scores;
    for (const RunSummary& r : runs) {
        for (const auto& [id, value] : r.composite) {
            scores[{id, r.week_predicted}] = value;
        }
    }

    fs::create_directories(out_dir);

    { // coverage counters, one row per analyzed week
        std::ofstream out(out_dir / "counters.csv");
        out << "week_start,n_areas_with_data,n_over_2sd,n_case_rises_2_5x\n";
        for (const RunSummary& r : runs) {
            out << r.week_predicted.str() << ',' << r.n_areas_with_data << ',' << r.n_over_sd
                << ',';
            if (r.n_case_rises) {
                out << *r.n_case_rises;
            }
            out << '\n';
        }
    }

    EpiSeries cases = EpiSeries::load_cases_csv(config.cases);
    JumpRule rule = config.jump_rule == "sd" ? JumpRule::sd : JumpRule::ratio;
    JumpLabels case_labels = label_jumps(cases.weekly(), rule, jump_params(config));
    auto case_sweep = auc_vs_lag(scores, case_labels, config.lag_weeks_lo, config.lag_weeks_hi);
    write_auc_sweep_csv(out_dir / "auc_vs_lag_cases.csv", scores, case_labels, case_sweep);
    if (std::none_of(case_sweep.begin(), case_sweep.end(),
                     [](const auto& e) { return e.second.has_value(); })) {
        std::cerr << "warning: AUC undefined at every lag for cases "
                     "(no positive/negative label pairs)\n";
    }

    std::vector<std::pair<int, std::optional<RocResult>>> mortality_sweep;
    if (!config.mortality.empty()) {
        EpiSeries mortality = EpiSeries::load_mortality_csv(config.mortality);
        JumpLabels death_labels = label_jumps(mortality.weekly(), rule, jump_params(config));
        mortality_sweep =
            auc_vs_lag(scores, death_labels, config.lag_weeks_lo, config.lag_weeks_hi);
        write_auc_sweep_csv(out_dir / "auc_vs_lag_mortality.csv", scores, death_labels,
                            mortality_sweep);
    }

    // Table of per-keyword best-lag correlations, when search data is given.
    bool lag_table_written = false;
    const KeywordRegistry& registry = KeywordRegistry::standard();
    DailySearch search;
    if (!config.daily_search.empty()) {
        search = load_daily_search_csv(config.daily_search, registry);
    } else if (!config.panel.empty()) {
        Panel panel = apply_suppression(Panel::load_csv(config.panel), config.min_area_users,
                                        config.min_cell_users);
        search = daily_search_from_panel(panel);
    }
    if (!search.empty()) {
        LagParams lp;
        lp.lag_min_days = config.lag_days_lo;
        lp.lag_max_days = config.lag_days_hi;
        std::vector<LagTableRow> rows = median_lag_table(search, cases, registry, lp);
        std::ofstream out(out_dir / "lag_table.csv");
        out << "keyword,median_correlation,median_lag_days\n";
        for (const LagTableRow& row : rows) {
            out << row.keyword << ',' << num(row.median_correlation) << ','
                << row.median_lag_days << '\n';
        }
        lag_table_written = true;
    } else {
        std::cerr << "warning: no --daily-search or --panel given; skipping the lag table\n";
    }

    if (config.plots) {
        std::vector<svg::Series> series{sweep_series(case_sweep, "cases", "#1f6fb2")};
        if (!mortality_sweep.empty()) {
            series.push_back(sweep_series(mortality_sweep, "mortality", "#b23a1f"));
        }
        svg::write_line_plot(out_dir / "auc_vs_lag.svg",
                             {720, 440, "Detection AUC by lead time", "lag (weeks)", "AUC"},
                             series);
        const RocResult* best = nullptr;
        for (const auto& [lag, result] : case_sweep) {
            if (result && (best == nullptr || result->auc > best->auc)) {
                best = &*result;
            }
        }
        if (best != nullptr) {
            svg::Series roc;
            roc.label = "lag " + std::to_string(best->lag_weeks) + "w";
            for (const auto& [fpr, tpr] : best->roc_points) {
                roc.points.emplace_back(fpr, tpr);
            }
            svg::Series diag;
            diag.color = "#999999";
            diag.points = {{0.0, 0.0}, {1.0, 1.0}};
            svg::write_line_plot(out_dir / "roc_cases_best_lag.svg",
                                 {560, 560, "ROC, composite vs case jumps",
                                  "false positive rate", "true positive rate"},
                                 {roc, diag});
        }
        svg::Series covered, over_sd, rises;
        covered.label = "areas covered";
        covered.color = "#1f6fb2";
        over_sd.label = "over threshold";
        over_sd.color = "#b23a1f";
        rises.label = "case rises";
        rises.color = "#2d8a2d";
        for (const RunSummary& r : runs) {
            double x = static_cast<double>(
                weeks_between(runs.front().week_predicted, r.week_predicted));
            covered.points.emplace_back(x, static_cast<double>(r.n_areas_with_data));
            over_sd.points.emplace_back(x, static_cast<double>(r.n_over_sd));
            if (r.n_case_rises) {
                rises.points.emplace_back(x, static_cast<double>(*r.n_case_rises));
            }
        }
        svg::write_line_plot(out_dir / "counters.svg",
                             {720, 440, "Weekly coverage and exceedance counts",
                              "weeks since first run", "areas"},
                             {covered, over_sd, rises});
    }

    std::cout << "evaluate: " << runs.size() << " runs";
    if (lag_table_written) {
        std::cout << ", lag table";
    }
    std::cout << ", AUC sweep over lags [" << config.lag_weeks_lo << ", " << config.lag_weeks_hi
              << "] -> " << out_dir.string() << "\n";
    return 0;
}

int cmd_report(const fs::path& eval_dir, const fs::path& out_dir) {
    if (!fs::is_directory(eval_dir)) {
        throw Error(ErrorKind::input,
                    "evaluation directory '" + eval_dir.string() + "' does not exist");
    }
    fs::create_directories(out_dir);
    std::ofstream report(out_dir / "report.txt");

    auto read_sweep = [](const fs::path& p) {
        std::vector<std::tuple<int, std::optional<double>>> out;
        csv::Reader reader(p, {"lag", "auc", "n_pos", "n_neg"});
        std::vector<std::string> row;
        while (reader.next(row)) {
            int lag = std::stoi(row[0]);
            if (row[1] == "undefined") {
                out.emplace_back(lag, std::nullopt);
            } else {
                out.emplace_back(lag, std::stod(row[1]));
            }
        }
        return out;
    };

    std::vector<svg::Series> auc_series;
    for (const auto& [file, label, color] :
         {std::tuple{"auc_vs_lag_cases.csv", "cases", "#1f6fb2"},
          std::tuple{"auc_vs_lag_mortality.csv", "mortality", "#b23a1f"}}) {
        fs::path p = eval_dir / file;
        if (!fs::exists(p)) {
            continue;
        }
        auto sweep = read_sweep(p);
        svg::Series s;
        s.label = label;
        s.color = color;
        s.markers = true;
        std::optional<std::pair<int, double>> best;
        for (const auto& [lag, auc] : sweep) {
            if (auc) {
                s.points.emplace_back(lag, *auc);
                if (!best || *auc > best->second) {
                    best = {lag, *auc};
                }
            }
        }
        auc_series.push_back(std::move(s));
        report << label << ": ";
        if (best) {
            char buf[80];
            std::snprintf(buf, sizeof(buf), "best AUC %.3f at lag %d week(s)\n", best->second,
                          best->first);
            report << buf;
        } else {
            report << "AUC undefined at every lag\n";
        }
    }
    if (!auc_series.empty()) {
        svg::write_line_plot(out_dir / "auc_vs_lag.svg",
                             {720, 440, "Detection AUC by lead time", "lag (weeks)", "AUC"},
                             auc_series);
    }

    fs::path lag_table = eval_dir / "lag_table.csv";
    if (fs::exists(lag_table)) {
        csv::Reader reader(lag_table, {"keyword", "median_correlation", "median_lag_days"});
        std::vector<std::string> row;
        std::vector<std::tuple<double, std::string, int>> rows;
        while (reader.next(row)) {
            rows.emplace_back(std::stod(row[1]), row[0], std::stoi(row[2]));
        }
        std::sort(rows.rbegin(), rows.rend());
        report << "\nkeywords by median correlation with cases:\n";
        for (const auto& [corr, kw, lag] : rows) {
            char buf[120];
            std::snprintf(buf, sizeof(buf), "  %-22s %6.3f at %+d day(s)\n", kw.c_str(), corr,
                          lag);
            report << buf;
        }
    }

    fs::path counters = eval_dir / "counters.csv";
    if (fs::exists(counters)) {
        csv::Reader reader(counters,
                           {"week_start", "n_areas_with_data", "n_over_2sd", "n_case_rises_2_5x"});
        std::vector<std::string> row;
        svg::Series covered{"areas covered", {}, "#1f6fb2", true};
        svg::Series over{"over threshold", {}, "#b23a1f", true};
        svg::Series rises{"case rises", {}, "#2d8a2d", true};
        std::optional<Week> first;
        report << "\nweekly coverage:\n";
        while (reader.next(row)) {
            Week w = Week::parse(row[0]);
            if (!first) {
                first = w;
            }
            double x = weeks_between(*first, w);
            covered.points.emplace_back(x, std::stod(row[1]));
            over.points.emplace_back(x, std::stod(row[2]));
            if (!row[3].empty()) {
                rises.points.emplace_back(x, std::stod(row[3]));
            }
            report << "  " << row[0] << ": " << row[1] << " areas, " << row[2]
                   << " over threshold";
            if (!row[3].empty()) {
                report << ", " << row[3] << " case rises";
            }
            report << "\n";
        }
        svg::write_line_plot(out_dir / "counters.svg",
                             {720, 440, "Weekly coverage and exceedance counts",
                              "weeks since first run", "areas"},
                             {covered, over, rises});
    }

    std::cout << "report -> " << out_dir.string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Regional outbreak-signal detection from search-query panels"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_flag;
    CliConfig config;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file");
        cmd->add_option("--out", out_flag, "output directory (overrides EPIQUERY_OUT)");
    };

    // synth
    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic scenario");
    add_common(synth);
    std::uint64_t seed = 0;
    int n_areas = 0, n_weeks = 0;
    std::string start;
    bool no_obs_noise = false, no_daily = false;
    std::vector<std::string> inject_specs;
    synth->add_option("--seed", seed, "scenario seed");
    synth->add_option("--areas", n_areas, "number of areas");
    synth->add_option("--weeks", n_weeks, "number of weeks");
    synth->add_option("--start", start, "first Monday (YYYY-MM-DD)");
    synth->add_flag("--exact", no_obs_noise, "disable Poisson observation noise");
    synth->add_flag("--no-daily-search", no_daily, "skip the daily search-fraction CSV");
    synth->add_option("--inject", inject_specs,
                      "anomaly injection AREA:WEEK:KEYWORD:EXCESS (repeatable)");

    // detect
    CLI::App* detect = app.add_subcommand("detect", "run weekly anomaly detection");
    add_common(detect);
    detect->add_option("--panel", config.panel, "panel CSV");
    detect->add_option("--areas", config.areas, "areas CSV");
    detect->add_option("--cases", config.cases, "daily cases CSV (optional)");
    detect->add_option("--start-week", config.start_week, "first fit week (YYYY-MM-DD)");
    std::uint64_t min_area_users = 0, min_cell_users = 0;
    double min_distance = 0, percentile = 0;
    int max_controls = 0;
    std::vector<std::string> pair_flag;
    detect->add_option("--min-area-users", min_area_users, "weekly per-area user floor");
    detect->add_option("--min-cell-users", min_cell_users, "per-cell user floor");
    detect->add_option("--min-distance-km", min_distance, "control distance floor");
    detect->add_option("--max-controls", max_controls, "controls per target");
    detect->add_option("--alert-percentile", percentile, "alert threshold percentile");
    detect->add_option("--composite", pair_flag, "composite keyword pair")->expected(2);

    // evaluate
    CLI::App* evaluate = app.add_subcommand("evaluate", "score detections against epi series");
    add_common(evaluate);
    evaluate->add_option("--runs", config.runs, "directory with run_*.json");
    evaluate->add_option("--cases", config.cases, "daily cases CSV");
    evaluate->add_option("--mortality", config.mortality, "weekly mortality CSV (optional)");
    evaluate->add_option("--panel", config.panel, "panel CSV (for the lag table)");
    evaluate->add_option("--daily-search", config.daily_search,
                         "daily search-fraction CSV (for the lag table)");
    evaluate->add_option("--rule", config.jump_rule, "jump rule: ratio | sd");
    evaluate->add_option("--sd-baseline", config.sd_baseline,
                         "sd rule baseline: per_area_history | cross_area_week");
    std::vector<int> lag_weeks_flag, lag_days_flag;
    evaluate->add_option("--lag-weeks", lag_weeks_flag, "AUC sweep lag range (weeks)")
        ->expected(2);
    evaluate->add_option("--lag-days", lag_days_flag, "correlation lag range (days)")
        ->expected(2);
    bool plots_flag = false;
    evaluate->add_flag("--plots", plots_flag, "emit SVG plots");

    // report
    CLI::App* report = app.add_subcommand("report", "render plots and a text summary");
    std::string eval_dir;
    report->add_option("--eval", eval_dir, "evaluation output directory")->required();
    report->add_option("--out", out_flag, "output directory (overrides EPIQUERY_OUT)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2; // bad flags are config errors
    }

    try {
        if (!config_path.empty()) {
            apply_config_file(config, config_path);
        }
        // flags win over the config file
        if (synth->parsed()) {
            if (synth->count("--seed")) config.scenario.seed = seed;
            if (synth->count("--areas")) config.scenario.n_areas = n_areas;
            if (synth->count("--weeks")) config.scenario.n_weeks = n_weeks;
            if (synth->count("--start")) config.scenario.start = parse_date(start);
            if (no_obs_noise) config.scenario.observation_noise = false;
            if (no_daily) config.emit_daily_search = false;
            for (const std::string& spec : inject_specs) {
                std::vector<std::string> parts;
                std::size_t from = 0;
                while (true) {
                    std::size_t colon = spec.find(':', from);
                    if (colon == std::string::npos) {
                        parts.push_back(spec.substr(from));
                        break;
                    }
                    parts.push_back(spec.substr(from, colon - from));
                    from = colon + 1;
                }
                if (parts.size() != 4) {
                    throw Error(ErrorKind::config,
                                "--inject expects AREA:WEEK:KEYWORD:EXCESS, got '" + spec +
                                    "'");
                }
                config.scenario.injections.emplace_back(parts[0], Week::parse(parts[1]),
                                                        parts[2], std::stod(parts[3]));
            }
        }
        if (detect->parsed()) {
            if (detect->count("--min-area-users")) config.min_area_users = min_area_users;
            if (detect->count("--min-cell-users")) config.min_cell_users = min_cell_users;
            if (detect->count("--min-distance-km")) config.min_distance_km = min_distance;
            if (detect->count("--max-controls")) config.max_controls = max_controls;
            if (detect->count("--alert-percentile")) config.alert_percentile = percentile;
            if (detect->count("--composite")) config.composite_pair = pair_flag;
        }
        if (evaluate->parsed()) {
            if (evaluate->count("--lag-weeks")) {
                config.lag_weeks_lo = lag_weeks_flag[0];
                config.lag_weeks_hi = lag_weeks_flag[1];
            }
            if (evaluate->count("--lag-days")) {
                config.lag_days_lo = lag_days_flag[0];
                config.lag_days_hi = lag_days_flag[1];
            }
            if (plots_flag) config.plots = true;
        }
        validate_config(config);

        if (synth->parsed()) {
            return cmd_synth(config, resolve_output_dir(config, out_flag));
        }
        if (detect->parsed()) {
            return cmd_detect(config, resolve_output_dir(config, out_flag));
        }
        if (evaluate->parsed()) {
            return cmd_evaluate(config, resolve_output_dir(config, out_flag));
        }
        if (report->parsed()) {
            return cmd_report(eval_dir, resolve_output_dir(config, out_flag));
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
