#pragma once

#include <stdexcept>
#include <string>

namespace gd {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input errors: bad arguments, malformed files, graphs violating preconditions.
class InputError : public Error {
public:
    using Error::Error;
};

class InvalidParameter : public InputError {
public:
    using InputError::InputError;
};

class InvalidGraph : public InputError {
public:
    using InputError::InputError;
};

class InsufficientData : public InputError {
public:
    using InputError::InputError;
};

class UndefinedSimilarity : public InputError {
public:
    using InputError::InputError;
};

/// Malformed text input. `line()` is 1-based.
class ParseError : public InputError {
public:
    ParseError(std::size_t line, const std::string& what)
        : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Numerical failures.
class NumericalError : public Error {
public:
    using Error::Error;
};

class SingularMatrix : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ConvergenceFailure : public NumericalError {
public:
    ConvergenceFailure(const std::string& what, double residual)
        : NumericalError(what + " (residual " + std::to_string(residual) + ")"),
          residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

}  // namespace gd
