#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ksub {

/// Expression text could not be parsed. `offset()` is the byte position of
/// the first offending character.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::size_t offset)
        : std::runtime_error(message + " (at byte " + std::to_string(offset) + ")"),
          offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// A well-formed expression was evaluated outside its real domain
/// (log of a non-positive value, fractional power of a non-positive base, ...).
class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A point lies outside the surface domain, or too close to its boundary for
/// the requested finite-difference stencil.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical kernel failed. Carries the last trusted abscissa and the best
/// available estimate so callers do not lose partial results.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& message, double last_time, double best_estimate)
        : std::runtime_error(message), last_time_(last_time), best_estimate_(best_estimate) {}

    double last_time() const noexcept { return last_time_; }
    double best_estimate() const noexcept { return best_estimate_; }

private:
    double last_time_;
    double best_estimate_;
};

}  // namespace ksub
