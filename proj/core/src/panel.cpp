#include "epiquery/panel.hpp"

#include <fstream>

#include "epiquery/csv.hpp"
#include "epiquery/error.hpp"

namespace epiquery {

Panel::Panel(KeywordRegistry registry) : registry_(std::move(registry)) {}

void Panel::set_cell(Week week, const std::string& area_id, std::size_t keyword_idx,
                     std::uint64_t users_querying, std::uint64_t total_users) {
    if (keyword_idx >= registry_.size()) {
        throw Error(ErrorKind::input, "keyword index out of range");
    }
    if (users_querying > total_users) {
        throw Error(ErrorKind::input,
                    "users_querying " + std::to_string(users_querying) + " exceeds total_users " +
                        std::to_string(total_users) + " for (" + week.str() + ", " + area_id +
                        ", " + registry_.at(keyword_idx).canonical + ")");
    }
    AreaWeek& aw = data_[week][area_id];
    if (aw.counts.empty()) {
        aw.total = total_users;
        aw.counts.assign(registry_.size(), 0);
        aw.seen.assign(registry_.size(), false);
    } else if (aw.total != total_users) {
        throw Error(ErrorKind::input,
                    "conflicting total_users for (" + week.str() + ", " + area_id + "): " +
                        std::to_string(aw.total) + " vs " + std::to_string(total_users));
    }
    if (aw.seen[keyword_idx]) {
        throw Error(ErrorKind::input,
                    "duplicate cell (" + week.str() + ", " + area_id + ", " +
                        registry_.at(keyword_idx).canonical + ")");
    }
    aw.seen[keyword_idx] = true;
    aw.counts[keyword_idx] = users_querying;
}

std::vector<Week> Panel::weeks() const {
    std::vector<Week> out;
    out.reserve(data_.size());
    for (const auto& [week, areas] : data_) {
        out.push_back(week);
    }
    return out;
}

std::vector<std::string> Panel::area_ids(Week week) const {
    std::vector<std::string> out;
    auto it = data_.find(week);
    if (it == data_.end()) {
        return out;
    }
    out.reserve(it->second.size());
    for (const auto& [id, aw] : it->second) {
        out.push_back(id);
    }
    return out;
}

bool Panel::has(Week week, const std::string& area_id) const {
    auto it = data_.find(week);
    return it != data_.end() && it->second.count(area_id) != 0;
}

std::uint64_t Panel::total_users(Week week, const std::string& area_id) const {
    auto it = data_.find(week);
    if (it == data_.end()) {
        throw Error(ErrorKind::degenerate, "no data for week " + week.str());
    }
    auto jt = it->second.find(area_id);
    if (jt == it->second.end()) {
        throw Error(ErrorKind::degenerate,
                    "area '" + area_id + "' has no data in week " + week.str());
    }
    return jt->second.total;
}

std::uint64_t Panel::count(Week week, const std::string& area_id, std::size_t keyword_idx) const {
    auto it = data_.find(week);
    if (it == data_.end()) {
        throw Error(ErrorKind::degenerate, "no data for week " + week.str());
    }
    auto jt = it->second.find(area_id);
    if (jt == it->second.end()) {
        throw Error(ErrorKind::degenerate,
                    "area '" + area_id + "' has no data in week " + week.str());
    }
    return jt->second.counts.at(keyword_idx);
}

std::vector<double> Panel::fractions(Week week, const std::string& area_id) const {
    auto it = data_.find(week);
    if (it == data_.end()) {
        throw Error(ErrorKind::degenerate, "no data for week " + week.str());
    }
    auto jt = it->second.find(area_id);
    if (jt == it->second.end()) {
        throw Error(ErrorKind::degenerate,
                    "area '" + area_id + "' has no data in week " + week.str());
    }
    const AreaWeek& aw = jt->second;
    std::vector<double> out(registry_.size(), 0.0);
    if (aw.total == 0) {
        return out;
    }
    double total = static_cast<double>(aw.total);
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = static_cast<double>(aw.counts[k]) / total;
    }
    return out;
}

bool Panel::operator==(const Panel& other) const {
    if (!(registry_ == other.registry_) || data_.size() != other.data_.size()) {
        return false;
    }
    auto it = data_.begin();
    auto jt = other.data_.begin();
    for (; it != data_.end(); ++it, ++jt) {
        if (it->first != jt->first || it->second.size() != jt->second.size()) {
            return false;
        }
        auto a = it->second.begin();
        auto b = jt->second.begin();
        for (; a != it->second.end(); ++a, ++b) {
            if (a->first != b->first || a->second.total != b->second.total ||
                a->second.counts != b->second.counts) {
                return false;
            }
        }
    }
    return true;
}

Panel Panel::load_csv(const std::filesystem::path& path, KeywordRegistry registry) {
    csv::Reader reader(path,
                       {"week_start", "area_id", "keyword", "users_querying", "total_users"});
    Panel panel(std::move(registry));
    std::vector<std::string> row;
    while (reader.next(row)) {
        try {
            Week week{parse_date(row[0])};
            std::size_t kw = panel.registry_.index_of(row[2]);
            std::uint64_t users = csv::parse_u64(reader, row[3], "users_querying");
            std::uint64_t total = csv::parse_u64(reader, row[4], "total_users");
            panel.set_cell(week, row[1], kw, users, total);
        } catch (const Error& e) {
            reader.fail(e.what());
        }
    }
    return panel;
}

void Panel::write_csv(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorKind::input, "cannot write '" + path.string() + "'");
    }
    out << "week_start,area_id,keyword,users_querying,total_users\n";
    for (const auto& [week, areas] : data_) {
        std::string week_str = week.str();
        for (const auto& [id, aw] : areas) {
            for (std::size_t k = 0; k < aw.counts.size(); ++k) {
                out << week_str << ',' << csv::escape(id) << ','
                    << registry_.at(k).canonical << ',' << aw.counts[k] << ',' << aw.total
                    << '\n';
            }
        }
    }
}

Panel apply_suppression(const Panel& panel, std::uint64_t min_area_users,
                        std::uint64_t min_cell_users) {
    Panel out(panel.registry_);
    for (const auto& [week, areas] : panel.data_) {
        for (const auto& [id, aw] : areas) {
            if (aw.total < min_area_users) {
                continue; // whole (week, area) removed
            }
            auto& dest = out.data_[week][id];
            dest.total = aw.total;
            dest.counts.resize(aw.counts.size(), 0);
            dest.seen.assign(aw.counts.size(), true);
            for (std::size_t k = 0; k < aw.counts.size(); ++k) {
                dest.counts[k] = aw.counts[k] < min_cell_users ? 0 : aw.counts[k];
            }
        }
    }
    return out;
}

} // namespace epiquery
