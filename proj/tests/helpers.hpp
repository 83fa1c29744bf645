#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "epiquery/panel.hpp"
#include "epiquery/week.hpp"

namespace test_helpers {

inline epiquery::Week wk(const std::string& iso) {
    return epiquery::Week::parse(iso);
}

inline epiquery::Date day(const std::string& iso) {
    return epiquery::parse_date(iso);
}

/// Scratch directory removed on destruction.
struct TempDir {
    std::filesystem::path path;

    explicit TempDir(const std::string& tag) {
        static std::mt19937_64 rng{std::random_device{}()};
        path = std::filesystem::temp_directory_path() /
               (tag + "-" + std::to_string(rng()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path file(const std::string& name) const { return path / name; }
};

inline void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p);
    out << content;
}

/// Random fractions snapped to the 1e-6 grid so they survive a round-trip
/// through integer counts with total 1,000,000 bit-exactly.
template <typename Rng>
std::vector<double> grid_fractions(Rng& rng, std::size_t n, double lo = 0.001,
                                   double hi = 0.02) {
    std::vector<double> out(n);
    for (double& v : out) {
        v = static_cast<double>(std::llround(rng.uniform(lo, hi) * 1e6)) / 1e6;
    }
    return out;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Panel whose fractions are exactly representable: cell count =
/// round(fraction * total) with total a power of ten.
class PanelBuilder {
public:
    explicit PanelBuilder(epiquery::KeywordRegistry registry = epiquery::KeywordRegistry::standard())
        : panel_(std::move(registry)) {}

    PanelBuilder& cell(const std::string& week, const std::string& area, std::size_t kw,
                       std::uint64_t users, std::uint64_t total) {
        panel_.set_cell(wk(week), area, kw, users, total);
        return *this;
    }

    /// Sets all keywords for one (week, area) from a fraction vector.
    PanelBuilder& row(const std::string& week, const std::string& area,
                      const std::vector<double>& fractions, std::uint64_t total = 1000000) {
        for (std::size_t k = 0; k < fractions.size(); ++k) {
            auto users = static_cast<std::uint64_t>(
                std::llround(fractions[k] * static_cast<double>(total)));
            panel_.set_cell(wk(week), area, k, users, total);
        }
        return *this;
    }

    epiquery::Panel build() { return std::move(panel_); }

private:
    epiquery::Panel panel_;
};

} // namespace test_helpers
