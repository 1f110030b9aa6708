#pragma once

#include <stdexcept>
#include <string>

namespace closetest {

// Inputs whose sizes do not line up (vectors of different length, odd
// batch sizes, ...).
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// An index or symbol outside its admissible range.
struct RangeError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

// A numeric argument outside the domain a formula is stated for.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Structurally valid input on which the requested quantity is undefined
// (e.g. a statistic over zero samples).
struct DegenerateInputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Quadrature failed to reach the requested tolerance.  The message carries
// the diagnostics (interval, achieved error estimate, budget).
struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace closetest
