#pragma once

#include <stdexcept>
#include <string>

namespace mdiqkd {

// Argument outside the mathematical domain of an operation (negative
// intensity, mu1 <= mu2, probability outside [0, 1], ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A computation cannot be carried out to the required precision, or an
// input combination makes a bound degenerate. Never silently truncated.
class PreconditionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed configuration. `line` is 1-based, 0 when not tied to a line.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

} // namespace mdiqkd
