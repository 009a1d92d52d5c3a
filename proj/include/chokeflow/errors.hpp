#pragma once

#include <stdexcept>
#include <string>

namespace chokeflow {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad input data: malformed files, missing fields, non-physical values.
class InputError : public Error {
public:
    using Error::Error;
};

// A temperature left the validity range of an ideal-gas cp correlation.
class RangeError : public Error {
public:
    using Error::Error;
};

// The cubic has no root with Z > B.
class NoPhysicalRootError : public Error {
public:
    using Error::Error;
};

// An iterative solver hit its iteration cap.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double last_residual)
        : Error(what), last_residual_(last_residual) {}
    double last_residual() const noexcept { return last_residual_; }

private:
    double last_residual_;
};

// No temperature in the search bracket reproduces the requested enthalpy.
class UnreachableEnthalpyError : public Error {
public:
    using Error::Error;
};

// The separator train produced no stock-tank oil, so GOR is undefined.
class InfiniteGorError : public Error {
public:
    using Error::Error;
};

}  // namespace chokeflow
