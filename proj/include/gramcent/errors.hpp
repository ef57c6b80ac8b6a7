#pragma once

#include <stdexcept>
#include <string>

namespace gramcent {

/// Rejected input: malformed files, out-of-range indices, bad parameters.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A computation failed numerically. Base of all solver-level failures.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Infinite-horizon quantity requested for a network whose spectral radius
/// is not below one, so the defining series diverges.
class StabilityError : public NumericError {
public:
    StabilityError(const std::string& what, double radius)
        : NumericError(what), spectral_radius(radius) {}

    double spectral_radius;
};

/// An iteration hit its cap before reaching the requested tolerance.
class ConvergenceError : public NumericError {
public:
    ConvergenceError(const std::string& what, int iterations)
        : NumericError(what), iterations(iterations) {}

    int iterations;
};

/// Gramian too close to singular for the requested operation.
class SingularGramianError : public NumericError {
public:
    SingularGramianError(const std::string& what, double lambda_min)
        : NumericError(what), lambda_min(lambda_min) {}

    double lambda_min;
};

/// Single-target steering requested for a node the drivers cannot reach.
class TargetUnreachableError : public NumericError {
public:
    TargetUnreachableError(const std::string& what, double gram_diag)
        : NumericError(what), gram_diag(gram_diag) {}

    double gram_diag;
};

}  // namespace gramcent
