#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "epiquery/epi_series.hpp"
#include "epiquery/evaluation.hpp"
#include "epiquery/geo.hpp"
#include "epiquery/keywords.hpp"
#include "epiquery/panel.hpp"

namespace epiquery {

/// One area's incidence pulse: a logistic-derivative curve peaking at
/// `peak_day` (days from the scenario start) on top of a small endemic
/// baseline shared by the whole scenario.
struct EpidemicCurve {
    double peak_day = 21.0;
    double growth_rate = 0.2;        // 1/days
    double peak_daily_cases = 200.0; // expected incidence at the peak
};

/// How one keyword's query fraction couples to the epidemic: fraction(t) =
/// baseline + gain * pulse(t + lag_days) + noise, clipped to [0, 1]. The
/// pulse is the area's incidence shape normalized to peak 1, so `gain` is the
/// excess fraction at the epidemic peak and positive `lag_days` makes
/// searches lead cases.
struct SearchCoupling {
    double baseline = 0.003;
    double gain = 0.0;
    int lag_days = 0;
    double noise_sd = 0.0005;
};

/// Extra query fraction added to one weekly panel cell.
struct Injection {
    std::string area_id;
    Week week;
    std::string keyword;
    double excess = 0.0;

    Injection(std::string a, Week w, std::string k, double e)
        : area_id(std::move(a)), week(w), keyword(std::move(k)), excess(e) {}
};

/// Bounding box for generated area centroids with a minimum pairwise spacing.
struct GeoBox {
    double lat_lo = 50.0;
    double lat_hi = 55.5;
    double lon_lo = -5.5;
    double lon_hi = 1.5;
    double min_spacing_km = 60.0;
};

/// Fully seeded description of a synthetic multi-area epidemic and the
/// coupled search-query panel. The seed determines every generated value.
struct Scenario {
    std::uint64_t seed = 42;
    int n_areas = 20;
    int n_weeks = 10;
    Date start = Date{std::chrono::days{18323}}; // 2020-03-02, a Monday

    GeoBox geography;

    // Per-area epidemic curves; drawn from the ranges below when empty.
    std::vector<EpidemicCurve> epidemic;
    double onset_week_lo = 2.0, onset_week_hi = 6.0; // peak_day/7 range
    double growth_lo = 0.15, growth_hi = 0.30;
    double peak_lo = 80.0, peak_hi = 400.0;
    double baseline_daily_cases = 2.0;
    bool observation_noise = true; // Poisson-sample cases; exact curves when off

    // Keyword couplings; unlisted keywords are baseline + noise only, with
    // per-keyword baselines spread around default_baseline.
    std::map<std::string, SearchCoupling> search{
        {"pyrexia", {0.004, 0.006, 16, 0.0005}},
        {"cough", {0.006, 0.008, 17, 0.0005}},
        {"sore throat", {0.005, 0.005, 19, 0.0005}},
    };
    double default_baseline = 0.003;
    double default_noise_sd = 0.0005;

    std::uint64_t total_users_lo = 20000, total_users_hi = 80000; // per area

    std::vector<Injection> injections;

    double mortality_cfr = 0.10;
    int mortality_lag_weeks = 2;
};

/// Everything one scenario produces.
struct SynthData {
    AreaTable areas;
    Panel panel;          // weekly counts, rounded from fractions
    EpiSeries cases;      // daily
    EpiSeries mortality;  // weekly
    DailySearch daily_search; // pre-aggregation daily fractions, ground truth
    nlohmann::json ground_truth;
};

/// Deterministic area centroids: uniform in the box, rejecting points closer
/// than the minimum spacing. Ids are A001, A002, ...
AreaTable gen_geography(const Scenario& scenario);

/// Daily case series per area: endemic baseline + logistic-growth pulse,
/// Poisson-observed unless observation noise is off.
EpiSeries gen_epidemic(const Scenario& scenario);

/// Weekly query panel coupled to the scenario's epidemic curves, with
/// injections applied to the stated weekly cells. `epidemic` must come from
/// the same scenario.
Panel gen_search_panel(const Scenario& scenario, const EpiSeries& epidemic,
                       const KeywordRegistry& registry = KeywordRegistry::standard());

SynthData generate(const Scenario& scenario,
                   const KeywordRegistry& registry = KeywordRegistry::standard());

/// Deterministic, platform-independent random stream used by the generator.
class Rng {
public:
    Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream);

    std::uint64_t next();
    double uniform();                     // [0, 1)
    double uniform(double lo, double hi);
    std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi); // inclusive
    double normal();
    std::uint64_t poisson(double lambda);

private:
    std::uint64_t state_;
    bool has_cached_normal_ = false;
    double cached_normal_ = 0.0;
};

} // namespace epiquery
