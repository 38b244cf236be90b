#pragma once

#include <stdexcept>
#include <string>

namespace starkwp {

/// Bad user input: config files, flags, unit names, out-of-range parameters.
/// Mapped to exit code 1 by the CLI.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical routine failed to produce a usable result (divergent
/// integration, eigensolver non-convergence). Mapped to exit code 2.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Broken invariant between library objects (basis mismatch, missing cache
/// entry). Indicates a caller bug, not bad user input.
struct InternalError : std::logic_error {
    explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

/// Malformed data handed to an analysis routine (non-uniform sampling,
/// series too short).
struct InputError : std::runtime_error {
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace starkwp
