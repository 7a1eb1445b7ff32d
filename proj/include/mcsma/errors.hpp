#pragma once

#include <stdexcept>
#include <string>

namespace mcsma {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input: bad file, schema violation, invalid argument combination.
struct InputError : Error {
    using Error::Error;
};

// A configured resource cap (node count, state count) would be exceeded.
struct CapExceeded : Error {
    using Error::Error;
};

// A linear solve failed or did not reach the required residual.
struct SolveError : Error {
    using Error::Error;
};

// The requested quantity is not defined for the given rate model.
struct Unsupported : Error {
    using Error::Error;
};

}  // namespace mcsma
