#pragma once

#include <stdexcept>
#include <string>

namespace epiquery {

/// Error categories, numerically aligned with the CLI exit codes.
enum class ErrorKind {
    input = 1,      // unreadable or malformed input data
    config = 2,     // invalid configuration or parameters
    degenerate = 3, // data too thin or degenerate for the requested operation
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    int exit_code() const noexcept { return static_cast<int>(kind_); }

private:
    ErrorKind kind_;
};

} // namespace epiquery
