#pragma once

#include <stdexcept>
#include <string>

namespace diforge {

/// Base class for every failure this library reports deliberately.
/// The CLI maps subclasses onto its exit codes, so new error types
/// should derive from one of the categories below rather than from
/// Error directly.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Caller handed us something malformed: wrong dimensions, values
/// outside their documented domain, ids that do not exist. Exit code 2.
struct UsageError : Error {
    using Error::Error;
};

struct DimMismatch : UsageError {
    using UsageError::UsageError;
};

struct ZeroDirection : UsageError {
    using UsageError::UsageError;
};

/// Requested separation cannot exist on the given sphere (d > 2r).
struct Infeasible : UsageError {
    using UsageError::UsageError;
};

struct RadiusMismatch : UsageError {
    using UsageError::UsageError;
};

struct UnknownId : UsageError {
    using UsageError::UsageError;
};

struct EmptyCodebook : UsageError {
    using UsageError::UsageError;
};

struct TooFewWords : UsageError {
    using UsageError::UsageError;
};

struct SameIdPair : UsageError {
    using UsageError::UsageError;
};

struct InputOutOfBox : UsageError {
    using UsageError::UsageError;
};

/// Codebook depth incompatible with the ambient dimension (L > n−1).
struct DimensionUnderflow : UsageError {
    using UsageError::UsageError;
};

/// Random placement ran out of attempts before meeting the separation
/// target. Exit code 3.
struct PlacementExhausted : Error {
    using Error::Error;
};

/// Error-exponent parameter outside the validity region of the
/// rate-reliability construction. Exit code 4.
struct RegimeViolation : Error {
    using Error::Error;
};

} // namespace diforge
