#pragma once

#include <stdexcept>
#include <string>

namespace eecm {

// Bad configuration (malformed pack, invalid run config). CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Invalid argument to a model operation (non-positive dt, zero area, ...).
class ArgumentError : public std::invalid_argument {
public:
    explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

// Malformed or unusable input data (bad CSV row, uncovered breakpoints). CLI exit code 3.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Requested degradation has no stoichiometric-window solution in [0,1]^4.
class InfeasibleDegradationError : public std::runtime_error {
public:
    explicit InfeasibleDegradationError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace eecm
