#include "epiquery/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "epiquery/error.hpp"

namespace epiquery {

namespace {

constexpr std::uint64_t kMix = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += kMix);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Stream ids, combined with the scenario seed so that every generated
// quantity has its own order-independent random stream.
enum Stream : std::uint64_t {
    kGeography = 1,
    kEpidemicParams = 2,
    kObservation = 3,
    kSearchNoise = 4,
    kTotals = 5,
    kMortality = 6,
    kKeywordBaseline = 7,
};

double pulse(double u) {
    double s = 1.0 / (1.0 + std::exp(-u));
    return 4.0 * s * (1.0 - s); // 1 at u = 0, decaying to 0 both ways
}

std::string area_id_for(int idx) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "A%03d", idx + 1);
    return buf;
}

void validate(const Scenario& sc) {
    if (sc.n_areas < 1) {
        throw Error(ErrorKind::config, "scenario needs at least one area");
    }
    if (sc.n_weeks < 1) {
        throw Error(ErrorKind::config, "scenario needs at least one week");
    }
    if (!is_monday(sc.start)) {
        throw Error(ErrorKind::config, "scenario start must be a Monday");
    }
    if (!sc.epidemic.empty() && sc.epidemic.size() != static_cast<std::size_t>(sc.n_areas)) {
        throw Error(ErrorKind::config, "explicit epidemic curves must cover every area");
    }
    if (sc.geography.lat_lo >= sc.geography.lat_hi ||
        sc.geography.lon_lo >= sc.geography.lon_hi) {
        throw Error(ErrorKind::config, "empty geography box");
    }
    if (sc.total_users_lo > sc.total_users_hi || sc.total_users_lo == 0) {
        throw Error(ErrorKind::config, "invalid total_users range");
    }
    if (sc.mortality_cfr < 0.0 || sc.mortality_cfr > 1.0) {
        throw Error(ErrorKind::config, "mortality_cfr must be in [0, 1]");
    }
    if (sc.mortality_lag_weeks < 0) {
        throw Error(ErrorKind::config, "mortality_lag_weeks must be non-negative");
    }
    for (const auto& [name, coupling] : sc.search) {
        if (coupling.baseline < 0.0 || coupling.baseline > 1.0) {
            throw Error(ErrorKind::config, "baseline fraction for '" + name + "' out of [0, 1]");
        }
        if (coupling.noise_sd < 0.0) {
            throw Error(ErrorKind::config, "negative noise_sd for '" + name + "'");
        }
    }
}

std::vector<EpidemicCurve> area_curves(const Scenario& sc) {
    if (!sc.epidemic.empty()) {
        return sc.epidemic;
    }
    std::vector<EpidemicCurve> out;
    out.reserve(static_cast<std::size_t>(sc.n_areas));
    for (int a = 0; a < sc.n_areas; ++a) {
        Rng rng(sc.seed, {kEpidemicParams, static_cast<std::uint64_t>(a)});
        EpidemicCurve c;
        c.peak_day = 7.0 * rng.uniform(sc.onset_week_lo, sc.onset_week_hi);
        c.growth_rate = rng.uniform(sc.growth_lo, sc.growth_hi);
        c.peak_daily_cases = rng.uniform(sc.peak_lo, sc.peak_hi);
        out.push_back(c);
    }
    return out;
}

std::vector<std::uint64_t> area_totals(const Scenario& sc) {
    std::vector<std::uint64_t> out;
    out.reserve(static_cast<std::size_t>(sc.n_areas));
    for (int a = 0; a < sc.n_areas; ++a) {
        Rng rng(sc.seed, {kTotals, static_cast<std::uint64_t>(a)});
        out.push_back(rng.uniform_int(sc.total_users_lo, sc.total_users_hi));
    }
    return out;
}

/// Per-keyword coupling with baselines filled in for unlisted keywords.
std::vector<SearchCoupling> keyword_couplings(const Scenario& sc,
                                              const KeywordRegistry& registry) {
    std::vector<SearchCoupling> out(registry.size());
    for (std::size_t k = 0; k < registry.size(); ++k) {
        Rng rng(sc.seed, {kKeywordBaseline, k});
        out[k].baseline = sc.default_baseline * rng.uniform(0.5, 1.5);
        out[k].noise_sd = sc.default_noise_sd;
    }
    for (const auto& [name, coupling] : sc.search) {
        out[registry.index_of(name)] = coupling;
    }
    return out;
}

} // namespace

Rng::Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream) : state_(seed) {
    for (std::uint64_t s : stream) {
        state_ = state_ * 0x100000001B3ULL + s + 1;
        splitmix64(state_);
    }
    splitmix64(state_);
}

std::uint64_t Rng::next() {
    return splitmix64(state_);
}

double Rng::uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

std::uint64_t Rng::uniform_int(std::uint64_t lo, std::uint64_t hi) {
    return lo + next() % (hi - lo + 1);
}

double Rng::normal() {
    if (has_cached_normal_) {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    double u1 = 1.0 - uniform(); // (0, 1]
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * 3.14159265358979323846 * u2;
    cached_normal_ = r * std::sin(theta);
    has_cached_normal_ = true;
    return r * std::cos(theta);
}

std::uint64_t Rng::poisson(double lambda) {
    if (!(lambda >= 0.0)) {
        throw Error(ErrorKind::config, "negative Poisson rate");
    }
    std::uint64_t total = 0;
    // Knuth's product method underflows for large rates; split additively.
    while (lambda > 60.0) {
        total += poisson(60.0);
        lambda -= 60.0;
    }
    if (lambda == 0.0) {
        return total;
    }
    double limit = std::exp(-lambda);
    double p = 1.0;
    std::uint64_t k = 0;
    do {
        ++k;
        p *= uniform();
    } while (p > limit);
    return total + k - 1;
}

AreaTable gen_geography(const Scenario& sc) {
    validate(sc);
    Rng rng(sc.seed, {kGeography});
    AreaTable table;
    std::vector<Area> placed;
    const int max_attempts = 20000;
    for (int a = 0; a < sc.n_areas; ++a) {
        Area area;
        area.id = area_id_for(a);
        area.name = "Synthetic area " + std::to_string(a + 1);
        bool ok = false;
        for (int attempt = 0; attempt < max_attempts && !ok; ++attempt) {
            area.latitude = rng.uniform(sc.geography.lat_lo, sc.geography.lat_hi);
            area.longitude = rng.uniform(sc.geography.lon_lo, sc.geography.lon_hi);
            ok = true;
            for (const Area& other : placed) {
                if (distance_km(area, other) < sc.geography.min_spacing_km) {
                    ok = false;
                    break;
                }
            }
        }
        if (!ok) {
            throw Error(ErrorKind::config,
                        "cannot place " + std::to_string(sc.n_areas) + " areas at least " +
                            std::to_string(sc.geography.min_spacing_km) +
                            " km apart in the given box");
        }
        placed.push_back(area);
        table.add(std::move(area));
    }
    return table;
}

EpiSeries gen_epidemic(const Scenario& sc) {
    validate(sc);
    std::vector<EpidemicCurve> curves = area_curves(sc);
    EpiSeries out(SeriesKind::daily_cases);
    const int n_days = sc.n_weeks * 7;
    for (int a = 0; a < sc.n_areas; ++a) {
        Rng rng(sc.seed, {kObservation, static_cast<std::uint64_t>(a)});
        const EpidemicCurve& c = curves[static_cast<std::size_t>(a)];
        std::string id = area_id_for(a);
        for (int t = 0; t < n_days; ++t) {
            double lambda = sc.baseline_daily_cases +
                            c.peak_daily_cases * pulse(c.growth_rate * (t - c.peak_day));
            double value = sc.observation_noise ? static_cast<double>(rng.poisson(lambda))
                                                : lambda;
            out.add(id, sc.start + std::chrono::days{t}, value);
        }
    }
    return out;
}

Panel gen_search_panel(const Scenario& sc, const EpiSeries& epidemic,
                       const KeywordRegistry& registry) {
    validate(sc);
    if (epidemic.kind() != SeriesKind::daily_cases ||
        epidemic.areas() != gen_geography(sc).ids()) {
        throw Error(ErrorKind::config, "epidemic series does not match the scenario");
    }
    SynthData data = generate(sc, registry);
    return std::move(data.panel);
}

SynthData generate(const Scenario& sc, const KeywordRegistry& registry) {
    validate(sc);
    std::vector<EpidemicCurve> curves = area_curves(sc);
    std::vector<std::uint64_t> totals = area_totals(sc);
    std::vector<SearchCoupling> couplings = keyword_couplings(sc, registry);

    // Injections resolved to indices up front so bad names fail early.
    std::map<std::pair<std::string, Week>, std::map<std::size_t, double>> injections;
    for (const Injection& inj : sc.injections) {
        injections[{inj.area_id, inj.week}][registry.index_of(inj.keyword)] += inj.excess;
    }

    SynthData data{AreaTable{}, Panel{registry}, EpiSeries{SeriesKind::daily_cases},
                   EpiSeries{SeriesKind::weekly_deaths}, {}, {}};
    data.areas = gen_geography(sc);
    data.cases = gen_epidemic(sc);

    const int n_days = sc.n_weeks * 7;
    for (int a = 0; a < sc.n_areas; ++a) {
        const std::string id = area_id_for(a);
        const EpidemicCurve& curve = curves[static_cast<std::size_t>(a)];
        for (std::size_t k = 0; k < registry.size(); ++k) {
            const SearchCoupling& cp = couplings[k];
            Rng rng(sc.seed, {kSearchNoise, static_cast<std::uint64_t>(a), k});
            std::vector<double> daily(static_cast<std::size_t>(n_days), 0.0);
            for (int t = 0; t < n_days; ++t) {
                double f = cp.baseline;
                if (cp.gain != 0.0) {
                    f += cp.gain * pulse(curve.growth_rate * (t + cp.lag_days - curve.peak_day));
                }
                if (cp.noise_sd > 0.0) {
                    f += cp.noise_sd * rng.normal();
                }
                daily[static_cast<std::size_t>(t)] = std::clamp(f, 0.0, 1.0);
            }
            data.daily_search[k].emplace(id, DailySeries{sc.start, daily});

            for (int w = 0; w < sc.n_weeks; ++w) {
                double sum = 0.0;
                for (int d = 0; d < 7; ++d) {
                    sum += daily[static_cast<std::size_t>(w * 7 + d)];
                }
                double fraction = sum / 7.0;
                Week week{sc.start + std::chrono::days{7 * w}};
                auto inj = injections.find({id, week});
                if (inj != injections.end()) {
                    auto kw_inj = inj->second.find(k);
                    if (kw_inj != inj->second.end()) {
                        fraction += kw_inj->second;
                    }
                }
                fraction = std::clamp(fraction, 0.0, 1.0);
                std::uint64_t total = totals[static_cast<std::size_t>(a)];
                auto users = static_cast<std::uint64_t>(
                    std::llround(fraction * static_cast<double>(total)));
                users = std::min(users, total);
                data.panel.set_cell(week, id, k, users, total);
            }
        }
    }

    // Mortality follows the observed weekly case counts with a fixed lag.
    WeeklyCounts weekly_cases = data.cases.weekly();
    for (int a = 0; a < sc.n_areas; ++a) {
        const std::string id = area_id_for(a);
        Rng rng(sc.seed, {kMortality, static_cast<std::uint64_t>(a)});
        const auto& weeks = weekly_cases.at(id);
        for (int w = 0; w < sc.n_weeks; ++w) {
            Week week{sc.start + std::chrono::days{7 * w}};
            double lambda = 0.0;
            if (w >= sc.mortality_lag_weeks) {
                Week source{sc.start + std::chrono::days{7 * (w - sc.mortality_lag_weeks)}};
                auto it = weeks.find(source);
                if (it != weeks.end()) {
                    lambda = sc.mortality_cfr * it->second;
                }
            }
            double deaths = sc.observation_noise ? static_cast<double>(rng.poisson(lambda))
                                                 : lambda;
            data.mortality.add(id, week.start(), deaths);
        }
    }

    nlohmann::json truth;
    truth["seed"] = sc.seed;
    truth["n_areas"] = sc.n_areas;
    truth["n_weeks"] = sc.n_weeks;
    truth["start"] = format_date(sc.start);
    truth["observation_noise"] = sc.observation_noise;
    truth["baseline_daily_cases"] = sc.baseline_daily_cases;
    nlohmann::json areas_json;
    for (int a = 0; a < sc.n_areas; ++a) {
        const std::string id = area_id_for(a);
        const EpidemicCurve& c = curves[static_cast<std::size_t>(a)];
        const Area& area = data.areas.at(id);
        areas_json[id] = {{"latitude", area.latitude},
                          {"longitude", area.longitude},
                          {"peak_day", c.peak_day},
                          {"growth_rate", c.growth_rate},
                          {"peak_daily_cases", c.peak_daily_cases},
                          {"total_users", totals[static_cast<std::size_t>(a)]}};
    }
    truth["areas"] = std::move(areas_json);
    nlohmann::json keywords_json;
    for (std::size_t k = 0; k < registry.size(); ++k) {
        const SearchCoupling& cp = couplings[k];
        keywords_json[registry.at(k).canonical] = {{"baseline", cp.baseline},
                                                   {"gain", cp.gain},
                                                   {"lag_days", cp.lag_days},
                                                   {"noise_sd", cp.noise_sd}};
    }
    truth["keywords"] = std::move(keywords_json);
    nlohmann::json inj_json = nlohmann::json::array();
    for (const Injection& inj : sc.injections) {
        inj_json.push_back({{"area_id", inj.area_id},
                            {"week_start", inj.week.str()},
                            {"keyword", inj.keyword},
                            {"excess", inj.excess}});
    }
    truth["injections"] = std::move(inj_json);
    truth["mortality"] = {{"cfr", sc.mortality_cfr}, {"lag_weeks", sc.mortality_lag_weeks}};
    data.ground_truth = std::move(truth);
    return data;
}

} // namespace epiquery
