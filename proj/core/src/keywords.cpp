#include "epiquery/keywords.hpp"

#include <cctype>

#include "epiquery/error.hpp"

namespace epiquery {

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

KeywordRegistry::KeywordRegistry(std::vector<Keyword> rows) : rows_(std::move(rows)) {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const Keyword& kw = rows_[i];
        std::string canon = to_lower(kw.canonical);
        if (canon.empty()) {
            throw Error(ErrorKind::config, "keyword with empty canonical name");
        }
        if (!by_name_.emplace(canon, i).second) {
            throw Error(ErrorKind::config, "duplicate keyword '" + kw.canonical + "'");
        }
        names_.push_back(canon);
        for (const std::string& syn : kw.synonyms) {
            auto [it, inserted] = by_name_.emplace(to_lower(syn), i);
            if (!inserted && it->second != i) {
                throw Error(ErrorKind::config,
                            "synonym '" + syn + "' maps to more than one keyword");
            }
        }
    }
}

std::optional<std::size_t> KeywordRegistry::find(std::string_view name) const {
    auto it = by_name_.find(to_lower(name));
    if (it == by_name_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::size_t KeywordRegistry::index_of(std::string_view name) const {
    auto idx = find(name);
    if (!idx) {
        throw Error(ErrorKind::input, "unknown keyword '" + std::string(name) + "'");
    }
    return *idx;
}

const KeywordRegistry& KeywordRegistry::standard() {
    static const KeywordRegistry registry{{
        {"altered consciousness", {"altered consciousness"}},
        {"anorexia", {"appetite loss", "loss of appetite", "lost appetite"}},
        {"anosmia", {"loss of smell", "can't smell"}},
        {"arthralgia", {"joint ache", "joint aching", "joints ache", "joints aching"}},
        {"chest pain", {"chest pain"}},
        {"chills", {"chills"}},
        {"cough", {"cough"}},
        {"diarrhea", {"diarrhea", "diarrhoea"}},
        {"dry cough", {"dry cough"}},
        {"dyspnea", {"breathing difficult", "short breath", "shortness of breath"}},
        {"epistaxis", {"nose bleed", "nose bleeding"}},
        {"fatigue", {"fatigue"}},
        {"head ache", {"head ache", "headache"}},
        {"myalgia", {"muscle ache", "muscular pain"}},
        {"nasal congestion", {"blocked nose", "nasal congestion"}},
        {"nausea", {"nausea", "nauseous"}},
        {"pyrexia", {"fever", "high temperature"}},
        {"pneumonia", {"pneumonia", "respiratory infection", "respiratory symptoms"}},
        {"rash", {"rash"}},
        {"rhinorrhea", {"runny nose"}},
        {"seizure", {"seizure"}},
        {"sore throat", {"sore throat", "throat pain"}},
        {"sternutation", {"sneeze", "sneezing"}},
        {"tiredness", {"tiredness"}},
        {"vomiting", {"vomit", "vomiting"}},
    }};
    return registry;
}

} // namespace epiquery
