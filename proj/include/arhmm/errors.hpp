#pragma once

#include <stdexcept>
#include <string>

namespace arhmm {

// Misuse of an API surface: wrong sizes, unknown flags, inconsistent options.
struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Value outside the mathematical domain of an operation (x <= 0 for a gamma
// density, kappa < 0, boundary parameters passed to to_working, ...).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Malformed or structurally unusable input data (parse failures, empty files,
// too-short tracks).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numeric breakdown: singular linear systems, non-finite densities, all
// optimizer starts failing.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace arhmm
