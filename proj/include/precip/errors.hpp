#pragma once

#include <stdexcept>
#include <string>

namespace precip {

// All library failures derive from Error so callers can catch one type.
// Each condition gets its own class; what() carries the diagnostic.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Grid construction with nonpositive horizon or fewer than two steps.
struct InvalidGrid : Error {
    using Error::Error;
};

// Admissible set empty: box and budget cannot both hold.
struct InfeasibleSet : Error {
    using Error::Error;
};

// Size-dependent growth factor queried at x <= 0.
struct InvalidSize : Error {
    using Error::Error;
};

// Non-finite intermediate in the forward recurrence; message names the index.
struct NumericalBlowup : Error {
    using Error::Error;
};

// Characteristic power base nonpositive (cannot happen for beta < 1 with
// nonnegative growth; kept as a hard check).
struct DegenerateCharacteristic : Error {
    using Error::Error;
};

// Final zeroth moment below threshold: objective undefined.
struct EmptyPopulation : Error {
    using Error::Error;
};

// Vector lengths disagree (scenario vs control, control vs grid).
struct DimensionMismatch : Error {
    using Error::Error;
};

// Optimizer start point produced no particles.
struct BadInitialControl : Error {
    using Error::Error;
};

// Negative predicted decrease in the bundle loop: downshift contract broken.
struct ModelInconsistency : Error {
    using Error::Error;
};

// Config file rejected; message carries line/section context.
struct ConfigError : Error {
    using Error::Error;
};

} // namespace precip
