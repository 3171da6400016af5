// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace cfsa {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A factorization did not converge within its iteration budget.
class IterationFailure : public Error {
public:
    using Error::Error;
};

/// Operand shapes violate an operation's dimension requirement.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Not enough independent directions were available.
class RankError : public Error {
public:
    using Error::Error;
};

/// Snapshot data carries no usable signal (e.g. all-zero columns).
class DegenerateDataError : public Error {
public:
    using Error::Error;
};

/// No (transient, period) pair explains the sample at the requested tolerance.
class NoPeriodFound : public Error {
public:
    using Error::Error;
};

/// The implicit time-stepping matrix is numerically singular.
class SingularSystemError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration value.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed file, header mismatch, or failed read/write.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace cfsa
