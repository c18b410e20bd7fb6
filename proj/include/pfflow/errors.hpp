#pragma once

#include <stdexcept>
#include <string>

namespace pfflow {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// (G + eps I) could not be solved even after ridge escalation.
struct SingularMetricError : Error {
  using Error::Error;
};

// The dual entropy ascent produced a non-finite objective.
struct DualSolveError : Error {
  using Error::Error;
};

// T' <= 0 at a sample point; the change-of-variables oracle refuses.
struct NonMonotoneMapError : Error {
  using Error::Error;
};

// Bad experiment configuration (unknown key, out-of-range value, parse failure).
struct ConfigError : Error {
  using Error::Error;
};

// Explicit finite-volume stability bound violated.
struct StabilityError : Error {
  using Error::Error;
};

}  // namespace pfflow
