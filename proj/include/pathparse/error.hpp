#pragma once

#include <stdexcept>
#include <string>

namespace pathparse {

// Errors carry a machine-readable code naming the violated invariant.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

// Input violates a type invariant (bad lattice, malformed config, ...).
class ValidationError : public Error {
    using Error::Error;
};

// A partition is not a disjoint cover of the ensemble.
class StructuralError : public Error {
    using Error::Error;
};

// Enumeration would exceed a configured budget.
class BudgetError : public Error {
    using Error::Error;
};

// Arithmetic produced something that is mathematically impossible
// (negative squared magnitude, non-finite action, ...).
class NumericalIntegrityError : public Error {
    using Error::Error;
};

// Every joint probability is zero, so a conditional distribution is undefined.
class NormalizationError : public Error {
    using Error::Error;
};

}  // namespace pathparse
