#pragma once

#include <stdexcept>
#include <string>

namespace magheat {

// Invalid configuration: bad field expression, order above the jet cap,
// malformed config file. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A field or kernel could not be evaluated at the requested point
// (division by a zero jet, non-finite integrand).
class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain (t <= 0, non-positive fit samples).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Iterative method failed or a requested tolerance is unreachable.
// Maps to CLI exit code 4.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// API misuse: mismatched grids, caps exceeded.
class UsageError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace magheat
