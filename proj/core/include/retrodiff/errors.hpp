#pragma once

#include <stdexcept>
#include <string>

namespace retrodiff {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or out-of-contract input (bad grid size, invalid parameter, ...).
class InvalidInputError : public Error {
public:
    using Error::Error;
};

/// A parameter-choice rule has no admissible value for the requested inputs
/// (noise level too large, no sign change for the time root, ...).
class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// An exponential weight would leave the representable double range.
class OverflowGuardError : public Error {
public:
    using Error::Error;
};

/// A fixed-point sweep stopped contracting.
class DivergenceError : public Error {
public:
    using Error::Error;
};

/// The forward solution left the configured magnitude window.
class BlowupError : public Error {
public:
    BlowupError(const std::string& what, double time_of_failure)
        : Error(what), time(time_of_failure) {}
    double time;
};

/// Filesystem failures, reported with the offending path in the message.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace retrodiff
