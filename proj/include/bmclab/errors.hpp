#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace bmclab {

/// Invalid input: malformed spec documents, inconsistent laws, bad windows.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Mathematical degeneracy: one-sided supports, reducible kernels where
/// irreducibility is required, disconnected graphs.
class DegeneracyError : public std::runtime_error {
public:
    explicit DegeneracyError(const std::string& what) : std::runtime_error(what) {}
    DegeneracyError(const std::string& what, std::vector<double> witness)
        : std::runtime_error(what), witness_direction(std::move(witness)) {}

    /// Direction along which the degeneracy was certified, when available.
    std::vector<double> witness_direction;
};

/// An iterative method exhausted its budget without meeting its residual
/// contract, or a resource cap was exceeded.
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace bmclab
