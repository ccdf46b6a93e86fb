#pragma once

#include <stdexcept>
#include <string>

namespace qcap {

// Bad parameters / malformed configuration. The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& field, const std::string& msg)
        : std::invalid_argument(field + ": " + msg), field_(field) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// Arrival rate at or above the service rate: the queue has no stationary regime.
class StabilityError : public std::runtime_error {
public:
    explicit StabilityError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure at run time (e.g. quadrature that cannot reach its tolerance).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace qcap
