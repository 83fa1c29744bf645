#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace epiquery::csv {

/// Splits one CSV record. Double-quoted fields may contain commas and
/// doubled quotes; no multi-line fields.
std::vector<std::string> split(const std::string& line);

/// Quotes a field if it contains a comma, quote or whitespace padding.
std::string escape(const std::string& field);

std::string join(const std::vector<std::string>& fields);

/// Line-oriented CSV reader that validates a fixed header and reports
/// 1-based line numbers in errors.
class Reader {
public:
    Reader(const std::filesystem::path& path, const std::vector<std::string>& header);

    /// Reads the next record into `fields`. Returns false at end of file.
    /// Throws on a field-count mismatch.
    bool next(std::vector<std::string>& fields);

    std::size_t line_number() const { return line_; }
    const std::filesystem::path& path() const { return path_; }

    [[noreturn]] void fail(const std::string& message) const;

private:
    std::filesystem::path path_;
    std::ifstream in_;
    std::size_t line_ = 0;
    std::size_t n_fields_ = 0;
};

std::uint64_t parse_u64(const Reader& r, const std::string& field, const std::string& name);
double parse_double(const Reader& r, const std::string& field, const std::string& name);

} // namespace epiquery::csv
