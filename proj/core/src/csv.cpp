#include "epiquery/csv.hpp"

#include <charconv>

#include "epiquery/error.hpp"

namespace epiquery::csv {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"' && field.empty()) {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    out.push_back(std::move(field));
    return out;
}

std::string escape(const std::string& field) {
    bool needs_quotes = field.find_first_of(",\"") != std::string::npos;
    if (!needs_quotes) {
        return field;
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out += "\"\"";
        } else {
            out += c;
        }
    }
    out += '"';
    return out;
}

std::string join(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i != 0) {
            out += ',';
        }
        out += escape(fields[i]);
    }
    return out;
}

Reader::Reader(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), in_(path), n_fields_(header.size()) {
    if (!in_) {
        throw Error(ErrorKind::input, "cannot open '" + path.string() + "'");
    }
    std::string line;
    if (!std::getline(in_, line)) {
        throw Error(ErrorKind::input, "'" + path.string() + "' is empty (missing header)");
    }
    ++line_;
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (split(line) != header) {
        fail("unexpected header '" + line + "' (expected '" + join(header) + "')");
    }
}

bool Reader::next(std::vector<std::string>& fields) {
    std::string line;
    while (std::getline(in_, line)) {
        ++line_;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        fields = split(line);
        if (fields.size() != n_fields_) {
            fail("expected " + std::to_string(n_fields_) + " fields, got " +
                 std::to_string(fields.size()));
        }
        return true;
    }
    return false;
}

void Reader::fail(const std::string& message) const {
    throw Error(ErrorKind::input,
                path_.string() + ":" + std::to_string(line_) + ": " + message);
}

std::uint64_t parse_u64(const Reader& r, const std::string& field, const std::string& name) {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        r.fail(name + " '" + field + "' is not a non-negative integer");
    }
    return value;
}

double parse_double(const Reader& r, const std::string& field, const std::string& name) {
    double value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        r.fail(name + " '" + field + "' is not a number");
    }
    return value;
}

} // namespace epiquery::csv
