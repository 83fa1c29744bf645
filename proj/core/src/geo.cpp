#include "epiquery/geo.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "epiquery/csv.hpp"
#include "epiquery/error.hpp"

namespace epiquery {

namespace {

constexpr double kEarthRadiusKm = 6371.0;
constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

void validate_coordinates(const Area& a) {
    if (!(a.latitude >= -90.0 && a.latitude <= 90.0)) {
        throw Error(ErrorKind::input,
                    "area '" + a.id + "': latitude " + std::to_string(a.latitude) +
                        " out of [-90, 90]");
    }
    if (!(a.longitude >= -180.0 && a.longitude <= 180.0)) {
        throw Error(ErrorKind::input,
                    "area '" + a.id + "': longitude " + std::to_string(a.longitude) +
                        " out of [-180, 180]");
    }
}

} // namespace

double distance_km(const Area& a, const Area& b) {
    double phi1 = a.latitude * kDegToRad;
    double phi2 = b.latitude * kDegToRad;
    double dphi = (b.latitude - a.latitude) * kDegToRad;
    double dlambda = (b.longitude - a.longitude) * kDegToRad;
    double s1 = std::sin(dphi / 2.0);
    double s2 = std::sin(dlambda / 2.0);
    double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
    return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

AreaTable::AreaTable(std::vector<Area> areas) {
    for (Area& a : areas) {
        add(std::move(a));
    }
}

void AreaTable::add(Area area) {
    if (area.id.empty()) {
        throw Error(ErrorKind::input, "area with empty id");
    }
    validate_coordinates(area);
    std::string id = area.id;
    if (!by_id_.emplace(id, std::move(area)).second) {
        throw Error(ErrorKind::input, "duplicate area id '" + id + "'");
    }
}

const Area& AreaTable::at(const std::string& id) const {
    auto it = by_id_.find(id);
    if (it == by_id_.end()) {
        throw Error(ErrorKind::input, "unknown area id '" + id + "'");
    }
    return it->second;
}

std::vector<std::string> AreaTable::ids() const {
    std::vector<std::string> out;
    out.reserve(by_id_.size());
    for (const auto& [id, area] : by_id_) {
        out.push_back(id);
    }
    return out;
}

AreaTable AreaTable::load_csv(const std::filesystem::path& path) {
    csv::Reader reader(path, {"area_id", "name", "latitude", "longitude"});
    AreaTable table;
    std::vector<std::string> row;
    while (reader.next(row)) {
        Area area;
        area.id = row[0];
        area.name = row[1];
        area.latitude = csv::parse_double(reader, row[2], "latitude");
        area.longitude = csv::parse_double(reader, row[3], "longitude");
        try {
            table.add(std::move(area));
        } catch (const Error& e) {
            reader.fail(e.what());
        }
    }
    return table;
}

void AreaTable::write_csv(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorKind::input, "cannot write '" + path.string() + "'");
    }
    out << "area_id,name,latitude,longitude\n";
    char buf[64];
    for (const auto& [id, area] : by_id_) {
        std::snprintf(buf, sizeof(buf), "%.6f,%.6f", area.latitude, area.longitude);
        out << csv::escape(id) << ',' << csv::escape(area.name) << ',' << buf << '\n';
    }
}

} // namespace epiquery
