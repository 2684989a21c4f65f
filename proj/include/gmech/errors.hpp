#pragma once

#include <stdexcept>
#include <string>

namespace gmech {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A matrix expected to be skew-symmetric failed the tolerance check.
struct NotSkew : Error {
    using Error::Error;
};

/// Operands have incompatible dimensions.
struct DimensionMismatch : Error {
    using Error::Error;
};

/// A state or RK4 stage produced NaN/Inf; `time` is the failing time.
struct NonFiniteState : Error {
    double time;
    explicit NonFiniteState(const std::string& what, double t = 0.0)
        : Error(what), time(t) {}
};

/// A scalar field evaluated to NaN/Inf.
struct NonFiniteEvaluation : Error {
    using Error::Error;
};

/// convergence_order needs at least 3 step sizes.
struct InsufficientSteps : Error {
    using Error::Error;
};

/// Manakov deformation requires pairwise-distinct diagonal entries a_i.
struct DegenerateA : Error {
    using Error::Error;
};

/// Reconstruction requires an orthogonal initial rotation.
struct NotOrthogonal : Error {
    using Error::Error;
};

/// Ray state with n^2 - |p|^2 <= 0; such rays are not propagated.
struct GrazingIncidence : Error {
    using Error::Error;
};

/// Metric failed the symmetric-positive-definite check.
struct SingularMetric : Error {
    using Error::Error;
};

/// Bad user-supplied configuration or argument values.
struct ValidationError : Error {
    using Error::Error;
};

} // namespace gmech
