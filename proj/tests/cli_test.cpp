// Integration tests that drive the built CLI binary (EPIQUERY_CLI env var,
// set by ctest) through its subcommands, exit codes and file outputs.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "epiquery/epi_series.hpp"
#include "epiquery/evaluation.hpp"
#include "epiquery/json_io.hpp"
#include "epiquery/synthgen.hpp"
#include "helpers.hpp"

namespace fs = std::filesystem;
using namespace epiquery;
using namespace test_helpers;

namespace {

struct CmdResult {
    int code = -1;
    std::string out;
    std::string err;
};

const char* cli_path() {
    const char* cli = std::getenv("EPIQUERY_CLI");
    REQUIRE_MESSAGE(cli != nullptr, "EPIQUERY_CLI must point at the built binary");
    return cli;
}

CmdResult run_cli(const TempDir& dir, const std::string& args, const std::string& env = "") {
    fs::path out_file = dir.path / "stdout.txt";
    fs::path err_file = dir.path / "stderr.txt";
    std::string cmd = env + (env.empty() ? "" : " ") + cli_path() + " " + args + " > " +
                      out_file.string() + " 2> " + err_file.string();
    int status = std::system(cmd.c_str());
    CmdResult result;
    result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = read_file(out_file);
    result.err = read_file(err_file);
    return result;
}

std::vector<fs::path> files_under(const fs::path& root) {
    std::vector<fs::path> out;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (entry.is_regular_file()) {
            out.push_back(fs::relative(entry.path(), root));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(bool(in));
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> fields;
        std::string f;
        for (char ch : line) {
            if (ch == ',') {
                fields.push_back(f);
                f.clear();
            } else {
                f += ch;
            }
        }
        fields.push_back(f);
        rows.push_back(fields);
    }
    return rows;
}

} // namespace

TEST_CASE("synth is byte-deterministic for a fixed seed") {
    TempDir dir("cli-synth");
    CmdResult a = run_cli(dir, "synth --seed 42 --areas 6 --weeks 3 --out " +
                                   (dir.path / "a").string());
    CmdResult b = run_cli(dir, "synth --seed 42 --areas 6 --weeks 3 --out " +
                                   (dir.path / "b").string());
    REQUIRE_MESSAGE(a.code == 0, a.err);
    REQUIRE(b.code == 0);
    auto fa = files_under(dir.path / "a");
    auto fb = files_under(dir.path / "b");
    CHECK(fa == fb);
    CHECK(fa.size() == 6); // panel, areas, cases, mortality, search_daily, ground_truth
    for (const fs::path& rel : fa) {
        CHECK_MESSAGE(read_file(dir.path / "a" / rel) == read_file(dir.path / "b" / rel),
                      "differs: " << rel.string());
    }

    SUBCASE("a different seed changes the data") {
        CmdResult c = run_cli(dir, "synth --seed 43 --areas 6 --weeks 3 --out " +
                                       (dir.path / "c").string());
        REQUIRE(c.code == 0);
        CHECK(read_file(dir.path / "a/panel.csv") != read_file(dir.path / "c/panel.csv"));
    }
}

TEST_CASE("detect reruns are byte-identical") {
    TempDir dir("cli-detect");
    REQUIRE(run_cli(dir, "synth --seed 5 --areas 8 --weeks 4 --out " +
                             (dir.path / "data").string())
                .code == 0);
    std::string common = "detect --panel " + (dir.path / "data/panel.csv").string() +
                         " --areas " + (dir.path / "data/areas.csv").string() + " --cases " +
                         (dir.path / "data/cases.csv").string() + " --out ";
    CmdResult a = run_cli(dir, common + (dir.path / "r1").string());
    CmdResult b = run_cli(dir, common + (dir.path / "r2").string());
    REQUIRE_MESSAGE(a.code == 0, a.err);
    REQUIRE(b.code == 0);
    auto fa = files_under(dir.path / "r1");
    CHECK(fa == files_under(dir.path / "r2"));
    CHECK(fa.size() == 6); // 3 week pairs: run json + alerts csv each
    for (const fs::path& rel : fa) {
        CHECK(read_file(dir.path / "r1" / rel) == read_file(dir.path / "r2" / rel));
    }

    SUBCASE("run JSON parses back into a summary") {
        RunSummary summary =
            run_summary_from_json(load_json_file(dir.path / "r1/run_2020-03-09.json"));
        CHECK(summary.week_fitted == wk("2020-03-02"));
        CHECK(summary.week_predicted == wk("2020-03-09"));
        CHECK(summary.n_areas_with_data == 8);
        CHECK(summary.composite.size() == 8);
        CHECK(summary.n_case_rises.has_value());
    }
    SUBCASE("alerts CSV carries the documented header") {
        auto rows = read_csv(dir.path / "r1/alerts_2020-03-09.csv");
        REQUIRE(!rows.empty());
        CHECK(rows[0] == std::vector<std::string>{"week_start", "area_id", "composite",
                                                  "threshold", "both_negative_flag"});
    }
}

TEST_CASE("exit codes") {
    TempDir dir("cli-codes");

    SUBCASE("missing input file is an input error (1)") {
        CmdResult r = run_cli(dir, "detect --panel missing.csv --areas missing.csv --out " +
                                       (dir.path / "out").string());
        CHECK(r.code == 1);
        CHECK(r.err.find("cannot open") != std::string::npos);
    }
    SUBCASE("bad parameter is a config error (2)") {
        write_file(dir.file("p.csv"),
                   "week_start,area_id,keyword,users_querying,total_users\n");
        write_file(dir.file("a.csv"), "area_id,name,latitude,longitude\n");
        CmdResult r = run_cli(dir, "detect --panel " + dir.file("p.csv").string() +
                                       " --areas " + dir.file("a.csv").string() +
                                       " --alert-percentile 0 --out " +
                                       (dir.path / "out").string());
        CHECK(r.code == 2);
        CmdResult unknown_kw =
            run_cli(dir, "detect --panel " + dir.file("p.csv").string() + " --areas " +
                             dir.file("a.csv").string() + " --composite sniffles cough --out " +
                             (dir.path / "out").string());
        CHECK(unknown_kw.code == 2);
        CHECK(unknown_kw.err.find("sniffles") != std::string::npos);
    }
    SUBCASE("unknown flag is a config error (2)") {
        CmdResult r = run_cli(dir, "detect --no-such-flag");
        CHECK(r.code == 2);
    }
    SUBCASE("empty panel is degenerate data (3)") {
        write_file(dir.file("p.csv"),
                   "week_start,area_id,keyword,users_querying,total_users\n");
        write_file(dir.file("a.csv"), "area_id,name,latitude,longitude\n");
        CmdResult r = run_cli(dir, "detect --panel " + dir.file("p.csv").string() +
                                       " --areas " + dir.file("a.csv").string() + " --out " +
                                       (dir.path / "out").string());
        CHECK(r.code == 3);
        CHECK(r.err.find("no analyzable week pairs") != std::string::npos);
    }
    SUBCASE("single-area scenario cannot be detected (3)") {
        REQUIRE(run_cli(dir, "synth --seed 9 --areas 1 --weeks 3 --out " +
                                 (dir.path / "one").string())
                    .code == 0);
        CmdResult r =
            run_cli(dir, "detect --panel " + (dir.path / "one/panel.csv").string() +
                             " --areas " + (dir.path / "one/areas.csv").string() + " --out " +
                             (dir.path / "out").string());
        CHECK(r.code == 3);
        CHECK(r.err.find("no eligible control candidates") != std::string::npos);
    }
    SUBCASE("evaluate without runs is an input error (1)") {
        write_file(dir.file("c.csv"), "date,area_id,cases\n");
        CmdResult r = run_cli(dir, "evaluate --runs " + (dir.path / "nope").string() +
                                       " --cases " + dir.file("c.csv").string() + " --out " +
                                       (dir.path / "out").string());
        CHECK(r.code == 1);
    }
}

TEST_CASE("EPIQUERY_OUT supplies the output directory") {
    TempDir dir("cli-env");
    fs::path target = dir.path / "env-out";
    CmdResult r = run_cli(dir, "synth --seed 3 --areas 4 --weeks 2",
                          "EPIQUERY_OUT=" + target.string());
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK(fs::exists(target / "panel.csv"));

    SUBCASE("--out wins over the environment") {
        fs::path flagged = dir.path / "flag-out";
        CmdResult r2 = run_cli(dir, "synth --seed 3 --areas 4 --weeks 2 --out " +
                                        flagged.string(),
                               "EPIQUERY_OUT=" + (dir.path / "ignored").string());
        REQUIRE(r2.code == 0);
        CHECK(fs::exists(flagged / "panel.csv"));
        CHECK_FALSE(fs::exists(dir.path / "ignored"));
    }
}

TEST_CASE("config file values apply and flags override them") {
    TempDir dir("cli-config");
    REQUIRE(run_cli(dir, "synth --seed 21 --areas 6 --weeks 3 --out " +
                             (dir.path / "data").string())
                .code == 0);
    write_file(dir.file("config.json"), R"({
  "paths": {
    "panel": ")" + (dir.path / "data/panel.csv").string() + R"(",
    "areas": ")" + (dir.path / "data/areas.csv").string() + R"("
  },
  "output_dir": ")" + (dir.path / "from-config").string() + R"(",
  "thresholds": {"min_distance_km": 40.0}
})");
    CmdResult r = run_cli(dir, "detect --config " + dir.file("config.json").string());
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK(fs::exists(dir.path / "from-config/run_2020-03-09.json"));

    SUBCASE("a flag overrides the config path") {
        CmdResult r2 = run_cli(dir, "detect --config " + dir.file("config.json").string() +
                                        " --out " + (dir.path / "flagged").string());
        REQUIRE(r2.code == 0);
        CHECK(fs::exists(dir.path / "flagged/run_2020-03-09.json"));
    }
}

TEST_CASE("evaluate handles label-free data with a warning, exit 0") {
    TempDir dir("cli-nolabels");
    REQUIRE(run_cli(dir, "synth --seed 33 --areas 6 --weeks 4 --out " +
                             (dir.path / "data").string())
                .code == 0);
    REQUIRE(run_cli(dir, "detect --panel " + (dir.path / "data/panel.csv").string() +
                             " --areas " + (dir.path / "data/areas.csv").string() + " --out " +
                             (dir.path / "runs").string())
                .code == 0);
    // constant case counts: the ratio rule never fires, labels all false
    std::string cases = "date,area_id,cases\n";
    for (int d = 0; d < 28; ++d) {
        cases += format_date(parse_date("2020-03-02") + std::chrono::days{d}) + ",A001,40\n";
    }
    write_file(dir.file("flat_cases.csv"), cases);
    CmdResult r = run_cli(dir, "evaluate --runs " + (dir.path / "runs").string() +
                                   " --cases " + dir.file("flat_cases.csv").string() +
                                   " --out " + (dir.path / "eval").string());
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK(r.err.find("AUC undefined at every lag") != std::string::npos);
    auto rows = read_csv(dir.path / "eval/auc_vs_lag_cases.csv");
    REQUIRE(rows.size() > 1);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i][1] == "undefined");
    }
}

TEST_CASE("mortality shifted two weeks after cases moves the AUC peak by two") {
    TempDir dir("cli-mortality");

    // scenario with anomalies injected one week ahead of every case jump;
    // epidemics hit a staggered subset of areas so jumps stay sparse per week
    Scenario sc;
    sc.seed = 77;
    sc.n_areas = 15;
    sc.n_weeks = 10;
    sc.baseline_daily_cases = 4.0;
    sc.search.clear();
    sc.epidemic.assign(static_cast<std::size_t>(sc.n_areas), {0.0, 0.8, 0.0});
    for (int i = 0; i < 5; ++i) {
        sc.epidemic[static_cast<std::size_t>(3 * i)] = {21.0 + 6.0 * i, 0.8, 250.0};
    }
    EpiSeries cases = gen_epidemic(sc);
    JumpLabels labels = label_jumps(cases.weekly(), JumpRule::ratio);
    for (const auto& [key, positive] : labels.labels) {
        if (positive && key.second.start() > sc.start) {
            sc.injections.emplace_back(key.first, key.second.prev(), "pyrexia", 0.012);
            sc.injections.emplace_back(key.first, key.second.prev(), "cough", 0.012);
        }
    }
    REQUIRE(!sc.injections.empty());
    SynthData data = generate(sc);
    fs::create_directories(dir.path / "data");
    data.panel.write_csv(dir.path / "data/panel.csv");
    data.areas.write_csv(dir.path / "data/areas.csv");
    data.cases.write_csv(dir.path / "data/cases.csv");

    // mortality := weekly case counts shifted two weeks later
    EpiSeries mortality(SeriesKind::weekly_deaths);
    for (const auto& [id, weeks] : data.cases.weekly()) {
        for (const auto& [week, count] : weeks) {
            mortality.add(id, shift_weeks(week, 2).start(), count);
        }
    }
    mortality.write_csv(dir.path / "data/mortality.csv");

    REQUIRE(run_cli(dir, "detect --panel " + (dir.path / "data/panel.csv").string() +
                             " --areas " + (dir.path / "data/areas.csv").string() +
                             " --cases " + (dir.path / "data/cases.csv").string() + " --out " +
                             (dir.path / "runs").string())
                .code == 0);
    CmdResult r = run_cli(dir, "evaluate --runs " + (dir.path / "runs").string() +
                                   " --cases " + (dir.path / "data/cases.csv").string() +
                                   " --mortality " + (dir.path / "data/mortality.csv").string() +
                                   " --lag-weeks -4 8 --out " + (dir.path / "eval").string());
    REQUIRE_MESSAGE(r.code == 0, r.err);

    auto best_lag = [&](const fs::path& p) {
        auto rows = read_csv(p);
        REQUIRE(rows.size() > 1);
        int lag = 0;
        double best = -1.0;
        for (std::size_t i = 1; i < rows.size(); ++i) {
            if (rows[i][1] == "undefined") {
                continue;
            }
            double auc = std::stod(rows[i][1]);
            if (auc > best) {
                best = auc;
                lag = std::stoi(rows[i][0]);
            }
        }
        REQUIRE(best > 0.0);
        return lag;
    };
    int cases_lag = best_lag(dir.path / "eval/auc_vs_lag_cases.csv");
    int mortality_lag = best_lag(dir.path / "eval/auc_vs_lag_mortality.csv");
    CHECK(cases_lag == 1);
    CHECK(std::abs(mortality_lag - cases_lag - 2) <= 1);
}

TEST_CASE("report renders from evaluation outputs") {
    TempDir dir("cli-report");
    REQUIRE(run_cli(dir, "synth --seed 55 --areas 8 --weeks 5 --out " +
                             (dir.path / "data").string())
                .code == 0);
    REQUIRE(run_cli(dir, "detect --panel " + (dir.path / "data/panel.csv").string() +
                             " --areas " + (dir.path / "data/areas.csv").string() +
                             " --cases " + (dir.path / "data/cases.csv").string() + " --out " +
                             (dir.path / "runs").string())
                .code == 0);
    REQUIRE(run_cli(dir, "evaluate --runs " + (dir.path / "runs").string() + " --cases " +
                             (dir.path / "data/cases.csv").string() + " --daily-search " +
                             (dir.path / "data/search_daily.csv").string() + " --out " +
                             (dir.path / "eval").string())
                .code == 0);
    CmdResult r = run_cli(dir, "report --eval " + (dir.path / "eval").string() + " --out " +
                                   (dir.path / "report").string());
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK(fs::exists(dir.path / "report/report.txt"));
    CHECK(fs::exists(dir.path / "report/auc_vs_lag.svg"));
    CHECK(fs::exists(dir.path / "report/counters.svg"));
    std::string text = read_file(dir.path / "report/report.txt");
    CHECK(text.find("keywords by median correlation") != std::string::npos);
    CHECK(text.find("cough") != std::string::npos);
}
