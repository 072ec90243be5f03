#pragma once

#include <stdexcept>
#include <string>

namespace quintic {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Caller handed us something that violates a documented precondition
// (bad parameter range, malformed tables, mismatched array lengths, ...).
struct InvalidInput : Error {
    using Error::Error;
};

// An algorithm failed to produce a usable number (root bracketing failed,
// optimizer diverged, matrix not factorizable, ...).
struct NumericFailure : Error {
    using Error::Error;
};

// File system / parse problems for grids, CSV tables and JSON documents.
struct IoError : Error {
    using Error::Error;
};

}  // namespace quintic
