#pragma once

#include <stdexcept>
#include <string>

namespace gasfc {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed or inconsistent input data (CSV rows, date gaps, bad config).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Iterative solver failed to reach its tolerance within the iteration cap.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& msg, double residual)
        : Error(msg), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

}  // namespace gasfc
