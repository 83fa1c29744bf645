#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "epiquery/keywords.hpp"
#include "epiquery/week.hpp"

namespace epiquery {

/// Weekly per-area per-keyword query counts, normalized on demand to the
/// fraction of an area's active users who queried each keyword. Immutable
/// once constructed; reads are safe from concurrent contexts.
class Panel {
public:
    explicit Panel(KeywordRegistry registry);

    /// Reads `week_start,area_id,keyword,users_querying,total_users` rows.
    static Panel load_csv(const std::filesystem::path& path,
                          KeywordRegistry registry = KeywordRegistry::standard());

    void write_csv(const std::filesystem::path& path) const;

    /// Construction API. Cells may be set once; the per-(week, area) total
    /// must agree across calls. Throws if users > total.
    void set_cell(Week week, const std::string& area_id, std::size_t keyword_idx,
                  std::uint64_t users_querying, std::uint64_t total_users);

    const KeywordRegistry& registry() const { return registry_; }
    std::size_t n_keywords() const { return registry_.size(); }

    std::vector<Week> weeks() const;
    std::vector<std::string> area_ids(Week week) const;
    bool has(Week week, const std::string& area_id) const;

    std::uint64_t total_users(Week week, const std::string& area_id) const;
    std::uint64_t count(Week week, const std::string& area_id, std::size_t keyword_idx) const;

    /// Query fractions for all registered keywords, in registry order.
    /// Cells never reported are 0. Throws if the area has no total for the
    /// week ("no data" is distinct from "no searches").
    std::vector<double> fractions(Week week, const std::string& area_id) const;

    bool operator==(const Panel& other) const;

private:
    struct AreaWeek {
        std::uint64_t total = 0;
        std::vector<std::uint64_t> counts;
        std::vector<bool> seen; // duplicate-cell detection during construction
    };

    KeywordRegistry registry_;
    std::map<Week, std::map<std::string, AreaWeek>> data_;

    friend Panel apply_suppression(const Panel&, std::uint64_t, std::uint64_t);
};

/// Privacy suppression: for each week, drops areas whose weekly total is
/// below `min_area_users`, then zeroes (but keeps) cells below
/// `min_cell_users`. Idempotent; never increases a count.
Panel apply_suppression(const Panel& panel, std::uint64_t min_area_users = 10000,
                        std::uint64_t min_cell_users = 10);

} // namespace epiquery
