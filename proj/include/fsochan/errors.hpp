#pragma once

#include <stdexcept>
#include <string>

namespace fsochan {

// Input outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Quadrature / solver failure. `detail` carries diagnostics.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what, std::string detail = {})
        : std::runtime_error(what), detail(std::move(detail)) {}
    std::string detail;
};

// Scenario validation failure, one line per violated field.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace fsochan
