#pragma once

#include <stdexcept>
#include <string>

namespace ambc {

/// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Iterative or quadrature routine failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A log-domain quantity left the range where its exponential is representable.
class NumericOverflowError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Monte Carlo estimate too noisy to be reported.
class InsufficientSamplesError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Requested tag error probability cannot be reached on this channel.
class InfeasibleTargetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ambc
