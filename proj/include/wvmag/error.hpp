#pragma once

#include <stdexcept>
#include <string>

namespace wvmag {

// Bad input to a library call (non-finite angle, nonpositive length, ...).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Base for failures of an otherwise well-formed computation.
class ComputationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Pre- and post-selected states are (numerically) orthogonal, so the weak
// value is undefined.
class OrthogonalSelection : public ComputationError {
public:
    using ComputationError::ComputationError;
};

// Spectrometer window does not intersect the spectrum support.
class EmptyOverlap : public ComputationError {
public:
    using ComputationError::ComputationError;
};

// Too few points above the noise floor to fit a peak.
class InsufficientSignal : public ComputationError {
public:
    using ComputationError::ComputationError;
};

// Sensitivity is zero at the requested operating point.
class NotDetectable : public ComputationError {
public:
    using ComputationError::ComputationError;
};

}  // namespace wvmag
