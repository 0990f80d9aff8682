#pragma once

#include <stdexcept>
#include <string>

namespace dskg {

// Input outside an operation's documented domain (bad mass, reversed time
// interval, point off the light cone, ...).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// A numeric routine could not reach its accuracy target (iteration cap hit,
// quadrature failed to converge). Carries the best value obtained so far so
// callers can decide whether to degrade gracefully.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, double partial_value, double error_estimate)
        : std::runtime_error(what), partial(partial_value), estimate(error_estimate) {}

    double partial;
    double estimate;
};

// Malformed configuration (unknown schedule kind, bad JSON, invalid grid).
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

} // namespace dskg
