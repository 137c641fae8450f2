#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace aid {

/// Malformed or inconsistent input data. Carries the 1-based source line
/// when the error came from a file (0 otherwise).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A subsolver failed to converge or hit an impossible state.
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what, double residual = 0.0)
        : std::runtime_error(what), residual_(residual) {}

    /// Best optimality residual reached before giving up.
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Invalid run configuration (rates, tolerances, limits).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace aid
