#pragma once

#include <cmath>
#include <functional>

#include "gmech/algebra.hpp"
#include "gmech/integrate.hpp"
#include "gmech/vec3.hpp"

namespace gmech {

/// Poisson system on R^3 with bracket {f, h} = -grad C . (grad f x grad h).
/// The flow of any Hamiltonian H is xdot = grad C x grad H; C is a Casimir.
/// Analytic gradients are optional; absent ones fall back to fd_gradient3.
struct R3PoissonSystem {
    std::function<double(const Vec3&)> casimir;
    std::function<double(const Vec3&)> hamiltonian;
    std::function<Vec3(const Vec3&)> grad_casimir;     // optional
    std::function<Vec3(const Vec3&)> grad_hamiltonian; // optional
};

namespace detail {

inline Vec3 grad_or_fd(const std::function<Vec3(const Vec3&)>& grad,
                       const std::function<double(const Vec3&)>& f, const Vec3& x) {
    return grad ? grad(x) : fd_gradient3(f, x);
}

} // namespace detail

/// xdot = cross(grad C, grad H) at x.
inline Vec3 r3_rhs(const R3PoissonSystem& sys, const Vec3& x) {
    const Vec3 gc = detail::grad_or_fd(sys.grad_casimir, sys.casimir, x);
    const Vec3 gh = detail::grad_or_fd(sys.grad_hamiltonian, sys.hamiltonian, x);
    if (!is_finite(gc) || !is_finite(gh))
        throw NonFiniteEvaluation("r3_rhs: non-finite gradient");
    return cross(gc, gh);
}

/// Numerical bracket {f, g} = -grad C . (grad f x grad g), all gradients by
/// central differences.
inline double bracket_eval(const std::function<double(const Vec3&)>& f,
                           const std::function<double(const Vec3&)>& g,
                           const R3PoissonSystem& sys, const Vec3& x) {
    const Vec3 gc = fd_gradient3(sys.casimir, x);
    const Vec3 gf = fd_gradient3(f, x);
    const Vec3 gg = fd_gradient3(g, x);
    const double v = -dot(gc, cross(gf, gg));
    if (!std::isfinite(v)) throw NonFiniteEvaluation("bracket_eval: non-finite value");
    return v;
}

/// Drift of the Casimir along a 3-dimensional trajectory.
inline DriftReport check_casimir(const R3PoissonSystem& sys, const Trajectory& traj) {
    NamedInvariant inv{"casimir", [&sys](const std::vector<double>& s) {
                           return sys.casimir({s[0], s[1], s[2]});
                       }};
    return invariant_drift(traj, {inv});
}

/// Wrap an R3PoissonSystem as a generic ODE for the integrator.
inline OdeSystem r3_system(const R3PoissonSystem& sys) {
    return OdeSystem{3, [sys](double, const std::vector<double>& s) {
                         const Vec3 v = r3_rhs(sys, {s[0], s[1], s[2]});
                         return std::vector<double>{v.x, v.y, v.z};
                     }};
}

} // namespace gmech
