#pragma once

#include <stdexcept>
#include <string>

namespace bcx {

// Configuration / input errors (bad scenario files, mismatched shapes,
// wrong boundary-condition kind).  CLI maps these to exit code 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Validation failures (compatibility gate).  CLI exit code 2.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Runtime numerical failures: guard violation, NaN, Picard divergence,
// ill-conditioned systems.  CLI exit code 3.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IllConditionedError : NumericalError {
    using NumericalError::NumericalError;
};

} // namespace bcx
