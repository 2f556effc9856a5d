#pragma once

#include <stdexcept>
#include <string>

namespace zorichlab {

// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller supplied input outside an operation's precondition.
class PreconditionError : public Error {
public:
    using Error::Error;
};

// A valid input for which the numerical computation could not complete.
class NumericError : public Error {
public:
    using Error::Error;
};

class DomainError : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

class ZeroInputError : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

class ParityMismatchError : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

enum class Stage { first, second };

// exp(x3) would leave the finite double range.
class OverflowError : public NumericError {
public:
    OverflowError(Stage stage, double exponent);

    Stage stage() const noexcept { return stage_; }
    double exponent() const noexcept { return exponent_; }

private:
    Stage stage_;
    double exponent_;
};

class DegenerateError : public NumericError {
public:
    using NumericError::NumericError;
};

class NoIntersectionError : public NumericError {
public:
    NoIntersectionError(const std::string& what, double range_lo, double range_hi);

    double range_lo() const noexcept { return lo_; }
    double range_hi() const noexcept { return hi_; }

private:
    double lo_;
    double hi_;
};

}  // namespace zorichlab
