#pragma once

#include <stdexcept>
#include <string>

namespace caflow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: wrong grid size, p < 1, negative time step, bad descriptor.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// The state left the class of strictly convex bodies containing the origin.
class NonConvex : public Error {
public:
    NonConvex(std::string what, int index, double value)
        : Error(std::move(what)), index_(index), value_(value) {}

    /// Grid index of the first offending sample.
    int index() const noexcept { return index_; }
    /// Offending value (radius of curvature or support value).
    double value() const noexcept { return value_; }

private:
    int index_;
    double value_;
};

class Singular : public Error {
public:
    using Error::Error;
};

class OptimFail : public Error {
public:
    using Error::Error;
};

class SandwichViolation : public Error {
public:
    using Error::Error;
};

/// Requested time is at or past the extinction time of a closed-form solution.
class Extinct : public Error {
public:
    using Error::Error;
};

}  // namespace caflow
