#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace epiquery {

/// A geographic reporting area with centroid coordinates.
struct Area {
    std::string id;
    std::string name;
    double latitude = 0.0;  // degrees, [-90, 90]
    double longitude = 0.0; // degrees, [-180, 180]

    bool operator==(const Area&) const = default;
};

/// Great-circle distance between two area centroids in kilometres
/// (haversine on a sphere of radius 6371 km).
double distance_km(const Area& a, const Area& b);

/// Unique-id set of areas, ordered by id.
class AreaTable {
public:
    AreaTable() = default;
    explicit AreaTable(std::vector<Area> areas);

    static AreaTable load_csv(const std::filesystem::path& path);
    void write_csv(const std::filesystem::path& path) const;

    void add(Area area); // throws on duplicate id or bad coordinates

    std::size_t size() const { return by_id_.size(); }
    bool contains(const std::string& id) const { return by_id_.count(id) != 0; }
    const Area& at(const std::string& id) const; // throws input error if unknown
    std::vector<std::string> ids() const;

    auto begin() const { return by_id_.begin(); }
    auto end() const { return by_id_.end(); }

    bool operator==(const AreaTable&) const = default;

private:
    std::map<std::string, Area> by_id_;
};

} // namespace epiquery
