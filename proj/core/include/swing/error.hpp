#pragma once

#include <stdexcept>
#include <string>

namespace swing {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The contract admits no consumption plan satisfying all constraints.
class FeasibilityError : public Error {
public:
    using Error::Error;
};

/// An argument lies outside the domain of an operation (unattainable state,
/// bad date index, dimension mismatch).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Configuration text could not be parsed or failed validation.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Numerical failure inside an estimator (non-finite targets, diverged training).
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace swing
