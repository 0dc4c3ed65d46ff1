#pragma once

#include <stdexcept>
#include <string>

namespace fhl {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside an operation's domain (bad ratio, bad window, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure failed to reach its target accuracy.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Evaluation requested at (or numerically indistinguishable from) a pole.
class AtPoleError : public NumericError {
public:
    using NumericError::NumericError;
};

/// Sampled data does not cover the range an operation needs.
class CoverageError : public Error {
public:
    CoverageError(const std::string& what, double required)
        : Error(what), required_(required) {}
    double required() const noexcept { return required_; }

private:
    double required_;
};

/// Memory or work budget exceeded.
class ResourceError : public Error {
public:
    using Error::Error;
};

/// Geometric validity failure (self-intersection, open polyline, disconnected raster).
class GeometryError : public Error {
public:
    using Error::Error;
};

}  // namespace fhl
