// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <stdexcept>
#include <string>

#include "radp/types.hpp"

namespace radp {

/// Model or configuration data violates an invariant.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// An iterative solver ran out of iterations before reaching its tolerance.
class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(const std::string& what, prec_t residual, long iterations)
        : std::runtime_error(what + " (residual " + std::to_string(residual) + " after " +
                             std::to_string(iterations) + " iterations)"),
          residual_(residual), iterations_(iterations) {}

    prec_t residual() const { return residual_; }
    long iterations() const { return iterations_; }

private:
    prec_t residual_;
    long iterations_;
};

/// Iterates blew past the divergence threshold.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, prec_t norm, long iterations)
        : std::runtime_error(what + " (weight norm " + std::to_string(norm) + " at iteration " +
                             std::to_string(iterations) + ")"),
          norm_(norm), iterations_(iterations) {}

    prec_t norm() const { return norm_; }
    long iterations() const { return iterations_; }

private:
    prec_t norm_;
    long iterations_;
};

}  // namespace radp
