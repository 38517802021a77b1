#pragma once

#include <stdexcept>
#include <string>

namespace wfpc {

// Base of every error thrown by the library. Numerical failures (as opposed to
// bad input) derive from NumericalError so the CLI can map them to exit code 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

class MemoryCapExceeded : public Error {
public:
    using Error::Error;
};

class NonHermitian : public Error {
public:
    NonHermitian(const std::string& what, double magnitude)
        : Error(what), magnitude_(magnitude) {}
    double magnitude() const noexcept { return magnitude_; }

private:
    double magnitude_;
};

class DensityError : public Error {
public:
    enum class Kind { NonHermitian, TraceNotOne, NotPSD };

    DensityError(Kind kind, double magnitude);

    Kind kind() const noexcept { return kind_; }
    double magnitude() const noexcept { return magnitude_; }

private:
    Kind kind_;
    double magnitude_;
};

const char* to_string(DensityError::Kind kind);

class ConstructionFailed : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ZeroProbability : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ConditionViolated : public Error {
public:
    using Error::Error;
};

} // namespace wfpc
