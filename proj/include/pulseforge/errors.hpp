#pragma once

#include <stdexcept>
#include <string>

namespace pulseforge {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed programs, channel-type mismatches, schedule invariant violations.
struct ValidationError : Error {
    using Error::Error;
};

// Numerical failures: branch cuts, singular systems, non-convergence.
struct NumericError : Error {
    using Error::Error;
};

// An eigenvalue of the process matrix sits on (or too close to) the negative
// real axis, so the principal matrix logarithm is undefined. The evolution
// time must be shortened until all rotation angles drop below pi.
struct BranchCutError : NumericError {
    using NumericError::NumericError;
};

// A gate/qubit combination has no entry in the instruction-schedule map.
struct MissingDefinition : ValidationError {
    using ValidationError::ValidationError;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace pulseforge
