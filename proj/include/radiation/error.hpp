#pragma once

#include <stdexcept>
#include <string>

namespace radiation {

/// Raised when inputs violate a documented contract (bad config values,
/// inconsistent data, missing upstream artifacts). Maps to exit code 1.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised when a file or directory cannot be read or written. Maps to exit code 2.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace radiation
