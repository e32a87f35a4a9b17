#pragma once

#include <stdexcept>
#include <string>

namespace nlks {

/// Precondition or range violation on user-supplied input.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A linear solve did not reach its residual tolerance.
class SolverFailure : public std::runtime_error {
public:
    SolverFailure(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// The comparison ODE integrator could not keep the sub/super ordering.
class IntegratorFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    IoError(const std::string& what, std::string path)
        : std::runtime_error(what + ": " + path), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// Malformed or out-of-range run configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace nlks
