#pragma once

#include <stdexcept>
#include <string>

namespace softboltz {

/// Base of every error raised by the library. The CLI maps the concrete
/// subclasses onto its exit-code taxonomy.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Precondition violated by the caller (bad grid, non-unit vector, ...).
class InputError : public Error {
public:
    using Error::Error;
};

/// An integral that does not converge for the requested exponent.
class DivergentIntegralError : public Error {
public:
    using Error::Error;
};

/// Evaluation at a point where the quantity is singular (u = v, v = eta).
class SingularPointError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    ConfigError(const std::string& what, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

} // namespace softboltz
