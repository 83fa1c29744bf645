#include <cmath>

#include "doctest.h"

#include "epiquery/error.hpp"
#include "epiquery/evaluation.hpp"
#include "epiquery/synthgen.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace epiquery;
using namespace test_helpers;

namespace {

double pulse(double u) {
    double s = 1.0 / (1.0 + std::exp(-u));
    return 4.0 * s * (1.0 - s);
}

/// Incidence-shaped daily series peaking at `peak_day`.
std::vector<double> pulse_series(int n_days, double peak_day, double rate, double scale,
                                 double baseline) {
    std::vector<double> out(static_cast<std::size_t>(n_days));
    for (int t = 0; t < n_days; ++t) {
        out[static_cast<std::size_t>(t)] = baseline + scale * pulse(rate * (t - peak_day));
    }
    return out;
}

JumpLabels make_labels(std::initializer_list<std::tuple<const char*, const char*, bool>> rows) {
    JumpLabels labels;
    for (const auto& [area, week, value] : rows) {
        labels.labels[{area, wk(week)}] = value;
    }
    return labels;
}

} // namespace

TEST_CASE("moving_average") {
    SUBCASE("constants are unchanged") {
        std::vector<double> xs(20, 3.5);
        CHECK(moving_average(xs, 7) == xs);
        CHECK(moving_average(xs, 1) == xs);
    }
    SUBCASE("impulse response") {
        std::vector<double> xs{0, 0, 0, 7, 0, 0, 0};
        std::vector<double> out = moving_average(xs, 7);
        CHECK(out[3] == doctest::Approx(1.0)); // only full-window position
        CHECK(out[0] == doctest::Approx(7.0 / 4));
        CHECK(out[1] == doctest::Approx(7.0 / 5));
        CHECK(out[2] == doctest::Approx(7.0 / 6));
        CHECK(out[4] == doctest::Approx(7.0 / 6));
        CHECK(out[6] == doctest::Approx(7.0 / 4));
    }
    SUBCASE("matches the brute-force windowed mean") {
        Rng rng(30, {1});
        for (int window : {1, 2, 3, 5, 7, 10}) {
            std::vector<double> xs(40);
            for (double& x : xs) {
                x = rng.uniform(-5.0, 5.0);
            }
            std::vector<double> got = moving_average(xs, window);
            std::vector<double> want = test_oracles::windowed_mean(xs, window);
            REQUIRE(got.size() == want.size());
            for (std::size_t i = 0; i < got.size(); ++i) {
                CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
            }
        }
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(moving_average(std::vector<double>{}, 7), Error);
        CHECK_THROWS_AS(moving_average(std::vector<double>{1.0}, 0), Error);
    }
}

TEST_CASE("best_lag_correlation") {
    SUBCASE("a series against itself peaks at lag zero") {
        DailySeries s{day("2020-03-02"), pulse_series(90, 40, 0.2, 100, 2)};
        LagResult r = best_lag_correlation(s, s);
        CHECK(r.best_lag_days == 0);
        CHECK(r.best_correlation == doctest::Approx(1.0));
    }
    SUBCASE("noiseless 17-day lead is recovered exactly") {
        // search(t) tracks cases(t + 17)
        DailySeries cases{day("2020-03-02"), pulse_series(120, 60, 0.2, 300, 2)};
        DailySeries search{day("2020-03-02"), pulse_series(120, 60 - 17, 0.2, 0.005, 0.003)};
        LagResult r = best_lag_correlation(moving_average(search, 7), moving_average(cases, 7));
        CHECK(r.best_lag_days == 17);
        CHECK(r.best_correlation > 0.999);
    }
    SUBCASE("shifting the search series shifts the best lag") {
        for (int shift : {-6, 0, 5, 11}) {
            DailySeries cases{day("2020-03-02"), pulse_series(120, 60, 0.25, 300, 2)};
            DailySeries search{day("2020-03-02"),
                               pulse_series(120, 60 - 10 - shift, 0.25, 0.005, 0.003)};
            LagResult r = best_lag_correlation(search, cases);
            CHECK(r.best_lag_days == 10 + shift);
        }
    }
    SUBCASE("constant overlap is skipped; all-skipped is an error") {
        DailySeries flat{day("2020-03-02"), std::vector<double>(90, 1.0)};
        DailySeries cases{day("2020-03-02"), pulse_series(90, 40, 0.2, 100, 2)};
        CHECK_THROWS_WITH_AS(best_lag_correlation(flat, cases),
                             doctest::Contains("no lag in range"), Error);
    }
    SUBCASE("too little overlap is an error") {
        DailySeries a{day("2020-03-02"), {1, 2, 3, 4, 5}};
        CHECK_THROWS_AS(best_lag_correlation(a, a), Error);
    }
    SUBCASE("the correlogram only contains defined lags") {
        DailySeries s{day("2020-03-02"), pulse_series(50, 25, 0.2, 100, 2)};
        LagResult r = best_lag_correlation(s, s);
        for (const auto& [lag, corr] : r.correlogram) {
            CHECK(std::abs(corr) <= 1.0 + 1e-12);
            CHECK(50 - std::abs(lag) >= 30);
        }
    }
}

TEST_CASE("median_lag_table") {
    const KeywordRegistry& registry = KeywordRegistry::standard();
    std::size_t cough = registry.index_of("cough");

    auto scenario_with_lags = [&](const std::vector<int>& lags) {
        DailySearch search;
        EpiSeries cases(SeriesKind::daily_cases);
        for (std::size_t a = 0; a < lags.size(); ++a) {
            std::string id = "A" + std::to_string(a);
            double peak = 55.0 + 6.0 * static_cast<double>(a); // stagger epidemics
            std::vector<double> c = pulse_series(140, peak, 0.22, 250, 2);
            for (int t = 0; t < 140; ++t) {
                cases.add(id, day("2020-03-02") + std::chrono::days{t},
                          std::floor(c[static_cast<std::size_t>(t)]));
            }
            search[cough].emplace(
                id, DailySeries{day("2020-03-02"),
                                pulse_series(140, peak - lags[a], 0.22, 0.006, 0.004)});
        }
        return std::pair{std::move(search), std::move(cases)};
    };

    SUBCASE("single area: medians equal that area's values") {
        auto [search, cases] = scenario_with_lags({17});
        auto rows = median_lag_table(search, cases, registry);
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].keyword == "cough");
        CHECK(rows[0].median_lag_days == 17);
        CHECK(rows[0].median_correlation > 0.99);
        CHECK(rows[0].n_areas == 1);
    }
    SUBCASE("odd count takes the middle lag") {
        auto [search, cases] = scenario_with_lags({15, 17, 21});
        auto rows = median_lag_table(search, cases, registry);
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].median_lag_days == 17);
        CHECK(rows[0].n_areas == 3);
    }
    SUBCASE("even count: lower-middle lag, mean correlation") {
        auto [search, cases] = scenario_with_lags({15, 21});
        auto rows = median_lag_table(search, cases, registry);
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].median_lag_days == 15);
    }
    SUBCASE("keywords with no valid area are omitted") {
        auto [search, cases] = scenario_with_lags({17});
        // a keyword whose only series is constant: correlation undefined
        search[registry.index_of("rash")].emplace(
            "A0", DailySeries{day("2020-03-02"), std::vector<double>(140, 0.004)});
        auto rows = median_lag_table(search, cases, registry);
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].keyword == "cough");
    }
}

TEST_CASE("label_jumps ratio rule") {
    WeeklyCounts weekly;
    weekly["A"][wk("2020-03-02")] = 10;
    weekly["A"][wk("2020-03-09")] = 25;
    weekly["A"][wk("2020-03-16")] = 59;  // 2.36x
    weekly["A"][wk("2020-03-23")] = 0;
    weekly["A"][wk("2020-03-30")] = 11;  // prev == 0
    JumpLabels labels = label_jumps(weekly, JumpRule::ratio);

    CHECK_FALSE(labels.defined("A", wk("2020-03-02"))); // no predecessor
    CHECK(labels.at("A", wk("2020-03-09")) == true);    // 25 = 2.5 x 10
    CHECK(labels.at("A", wk("2020-03-16")) == false);   // below the ratio
    CHECK(labels.at("A", wk("2020-03-30")) == false);   // rise from zero doesn't count

    SUBCASE("10 -> 24 is below the 2.5x ratio") {
        WeeklyCounts w2;
        w2["B"][wk("2020-03-02")] = 10;
        w2["B"][wk("2020-03-09")] = 24;
        JumpLabels l2 = label_jumps(w2, JumpRule::ratio);
        CHECK(l2.at("B", wk("2020-03-09")) == false);
    }
    SUBCASE("invariant to scaling all counts") {
        WeeklyCounts scaled;
        for (const auto& [id, weeks] : weekly) {
            for (const auto& [w, c] : weeks) {
                scaled[id][w] = 17.0 * c;
            }
        }
        JumpLabels l2 = label_jumps(scaled, JumpRule::ratio);
        CHECK(l2.labels == labels.labels);
    }
}

TEST_CASE("label_jumps sd rule") {
    SUBCASE("constant series never jumps") {
        WeeklyCounts weekly;
        for (int i = 0; i < 8; ++i) {
            weekly["A"][Week{day("2020-03-02") + std::chrono::days{7 * i}}] = 40;
        }
        JumpLabels labels = label_jumps(weekly, JumpRule::sd);
        int defined = 0;
        for (const auto& [key, value] : labels.labels) {
            CHECK(value == false);
            ++defined;
        }
        CHECK(defined == 5); // weeks 4..8: two prior diffs required
    }
    SUBCASE("a spike after a stable history is labeled") {
        WeeklyCounts weekly;
        double counts[] = {40, 42, 41, 43, 90};
        for (int i = 0; i < 5; ++i) {
            weekly["A"][Week{day("2020-03-02") + std::chrono::days{7 * i}}] = counts[i];
        }
        JumpLabels labels = label_jumps(weekly, JumpRule::sd);
        CHECK(labels.at("A", wk("2020-03-30")) == true);
        CHECK(labels.at("A", wk("2020-03-23")) == false);
        CHECK_FALSE(labels.defined("A", wk("2020-03-09"))); // too little history
    }
    SUBCASE("cross-area baseline variant") {
        WeeklyCounts weekly;
        const char* areas[] = {"A", "B", "C", "D"};
        double w0[] = {40, 40, 40, 40};
        double w1[] = {42, 38, 41, 90}; // D jumps relative to the others
        for (int a = 0; a < 4; ++a) {
            weekly[areas[a]][wk("2020-03-02")] = w0[a];
            weekly[areas[a]][wk("2020-03-09")] = w1[a];
        }
        JumpParams params;
        params.sd_baseline = SdBaseline::cross_area_week;
        JumpLabels labels = label_jumps(weekly, JumpRule::sd, params);
        CHECK(labels.at("D", wk("2020-03-09")) == true);
        CHECK(labels.at("A", wk("2020-03-09")) == false);
    }
}

TEST_CASE("roc_auc") {
    SUBCASE("perfect separation gives AUC 1") {
        ScoreMap scores;
        JumpLabels labels;
        for (int i = 0; i < 10; ++i) {
            std::string id = "A" + std::to_string(i);
            scores[{id, wk("2020-03-02")}] = i < 5 ? 10.0 + i : -10.0 - i;
            labels.labels[{id, wk("2020-03-02")}] = i < 5;
        }
        RocResult r = roc_auc(scores, labels, 0);
        CHECK(r.auc == doctest::Approx(1.0));
        CHECK(r.n_pos == 5);
        CHECK(r.n_neg == 5);
        CHECK(r.roc_points.front() == std::pair{0.0, 0.0});
        CHECK(r.roc_points.back() == std::pair{1.0, 1.0});
    }
    SUBCASE("labels independent of scores give AUC near 0.5") {
        Rng rng(31, {2});
        ScoreMap scores;
        JumpLabels labels;
        std::size_t n_pos = 0, n_neg = 0;
        for (int i = 0; i < 800; ++i) {
            std::string id = "A" + std::to_string(i);
            scores[{id, wk("2020-03-02")}] = rng.uniform(0.0, 1.0);
            bool pos = rng.uniform() < 0.5;
            labels.labels[{id, wk("2020-03-02")}] = pos;
            (pos ? n_pos : n_neg) += 1;
        }
        RocResult r = roc_auc(scores, labels, 0);
        // null sampling SD of the Mann-Whitney AUC
        double sd = std::sqrt(static_cast<double>(n_pos + n_neg + 1) /
                              (12.0 * static_cast<double>(n_pos) *
                               static_cast<double>(n_neg)));
        CHECK(std::abs(r.auc - 0.5) < 3.0 * sd);
    }
    SUBCASE("rank method equals trapezoid integration with ties") {
        Rng rng(32, {3});
        for (int trial = 0; trial < 30; ++trial) {
            ScoreMap scores;
            JumpLabels labels;
            for (int i = 0; i < 20; ++i) {
                std::string id = "A" + std::to_string(i);
                // coarse grid forces ties
                scores[{id, wk("2020-03-02")}] = std::floor(rng.uniform(0.0, 5.0));
                labels.labels[{id, wk("2020-03-02")}] = rng.uniform() < 0.4;
            }
            std::size_t n_pos = 0;
            for (const auto& [k, v] : labels.labels) {
                n_pos += v ? 1 : 0;
            }
            if (n_pos == 0 || n_pos == labels.labels.size()) {
                continue;
            }
            RocResult r = roc_auc(scores, labels, 0);
            double area = 0.0;
            for (std::size_t i = 1; i < r.roc_points.size(); ++i) {
                area += (r.roc_points[i].first - r.roc_points[i - 1].first) *
                        (r.roc_points[i].second + r.roc_points[i - 1].second) / 2.0;
            }
            CHECK(r.auc == doctest::Approx(area).epsilon(1e-12));
            // monotone ROC
            for (std::size_t i = 1; i < r.roc_points.size(); ++i) {
                CHECK(r.roc_points[i].first >= r.roc_points[i - 1].first);
                CHECK(r.roc_points[i].second >= r.roc_points[i - 1].second);
            }
        }
    }
    SUBCASE("AUC is invariant to strictly increasing score transforms") {
        Rng rng(33, {4});
        ScoreMap scores, transformed;
        JumpLabels labels;
        for (int i = 0; i < 200; ++i) {
            std::string id = "A" + std::to_string(i);
            double s = rng.uniform(-2.0, 2.0);
            scores[{id, wk("2020-03-02")}] = s;
            transformed[{id, wk("2020-03-02")}] = std::exp(3.0 * s) - 7.0;
            labels.labels[{id, wk("2020-03-02")}] = rng.uniform() < 0.3;
        }
        CHECK(roc_auc(scores, labels, 0).auc ==
              doctest::Approx(roc_auc(transformed, labels, 0).auc).epsilon(1e-12));
    }
    SUBCASE("score at week w pairs with the label at w + lag") {
        ScoreMap scores;
        scores[{"A", wk("2020-03-02")}] = 5.0;
        scores[{"B", wk("2020-03-02")}] = 1.0;
        JumpLabels labels = make_labels({{"A", "2020-03-09", true}, {"B", "2020-03-09", false}});
        RocResult r = roc_auc(scores, labels, 1);
        CHECK(r.auc == doctest::Approx(1.0));
        CHECK_THROWS_AS(roc_auc(scores, labels, 0), Error); // no labels at lag 0
    }
    SUBCASE("one class missing is an error") {
        ScoreMap scores;
        scores[{"A", wk("2020-03-02")}] = 5.0;
        scores[{"B", wk("2020-03-02")}] = 1.0;
        JumpLabels labels = make_labels({{"A", "2020-03-02", true}, {"B", "2020-03-02", true}});
        CHECK_THROWS_WITH_AS(roc_auc(scores, labels, 0),
                             doctest::Contains("at least one positive and one negative"),
                             Error);
    }
}

TEST_CASE("auc_vs_lag reports undefined lags without failing the sweep") {
    ScoreMap scores;
    JumpLabels labels;
    // positives only exist at 2020-03-09; lag 1 pairs week 03-02 scores onto it
    for (int i = 0; i < 10; ++i) {
        std::string id = "A" + std::to_string(i);
        scores[{id, wk("2020-03-02")}] = static_cast<double>(i);
        labels.labels[{id, wk("2020-03-09")}] = i >= 7;
        labels.labels[{id, wk("2020-03-16")}] = false; // all false at lag 2
    }
    auto sweep = auc_vs_lag(scores, labels, 0, 2);
    REQUIRE(sweep.size() == 3);
    CHECK_FALSE(sweep[0].second.has_value()); // no labels at lag 0
    REQUIRE(sweep[1].second.has_value());
    CHECK(sweep[1].second->auc == doctest::Approx(1.0));
    CHECK_FALSE(sweep[2].second.has_value()); // no positives at lag 2
}
