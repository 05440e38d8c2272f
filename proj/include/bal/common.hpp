#pragma once

#include <stdexcept>
#include <string>

namespace bal {

// Shared absolute tolerance for equality-style comparisons.
inline constexpr double kTol = 1e-9;

struct Tol {
    double abs = kTol;
};

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class SingularityError : public Error {
public:
    using Error::Error;
};

class DegenerateIntervalError : public Error {
public:
    using Error::Error;
};

class InfeasibleBudgetError : public Error {
public:
    using Error::Error;
};

class UnsupportedError : public Error {
public:
    using Error::Error;
};

class NumericalFailure : public Error {
public:
    using Error::Error;
};

class CertificationFailure : public Error {
public:
    using Error::Error;
};

class InvalidThresholdsError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace bal
