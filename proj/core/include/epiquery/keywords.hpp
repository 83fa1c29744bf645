#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace epiquery {

/// One tracked symptom keyword and the query expressions mapped onto it.
struct Keyword {
    std::string canonical;
    std::vector<std::string> synonyms;
};

/// Fixed roster of symptom keywords. The keyword index assigned here is the
/// column order used by every per-keyword vector in the library.
class KeywordRegistry {
public:
    explicit KeywordRegistry(std::vector<Keyword> rows);

    /// The default 25-symptom roster.
    static const KeywordRegistry& standard();

    std::size_t size() const { return rows_.size(); }
    const Keyword& at(std::size_t idx) const { return rows_.at(idx); }

    /// Case-insensitive lookup by canonical name or synonym.
    std::optional<std::size_t> find(std::string_view name) const;

    /// Like find(), but throws an input error for unknown names.
    std::size_t index_of(std::string_view name) const;

    bool operator==(const KeywordRegistry& other) const { return names_ == other.names_; }

private:
    std::vector<Keyword> rows_;
    std::map<std::string, std::size_t> by_name_; // lowercased canonical + synonyms
    std::vector<std::string> names_;             // canonical, in index order
};

std::string to_lower(std::string_view s);

} // namespace epiquery
