#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <utility>

#include "gmech/algebra.hpp"
#include "gmech/rigid_body.hpp"
#include "gmech/vec3.hpp"

namespace gmech {

/// Heavy top: inertia, weight m g, and the body-frame vector chi from the
/// support point to the center of mass.
struct HeavyTopParams {
    Inertia3 I;
    double m;
    double g;
    Vec3 chi;
    HeavyTopParams(Inertia3 i, double mass, double grav, Vec3 c)
        : I(i), m(mass), g(grav), chi(c) {
        if (!(m > 0.0)) throw ValidationError("HeavyTopParams: m must be positive");
        if (!(g >= 0.0)) throw ValidationError("HeavyTopParams: g must be >= 0");
    }
};

/// Body angular momentum Pi and the unit vertical Gamma seen from the body.
struct HeavyTopState {
    Vec3 Pi;
    Vec3 Gamma;
};

/// Pidot = Pi x Omega + m g Gamma x chi, Gammadot = Gamma x Omega,
/// with Omega = I^{-1} Pi.
inline std::pair<Vec3, Vec3> heavy_top_rhs(const HeavyTopParams& p, const HeavyTopState& s) {
    const Vec3 omega = euler_omega(p.I, s.Pi);
    return {cross(s.Pi, omega) + (p.m * p.g) * cross(s.Gamma, p.chi),
            cross(s.Gamma, omega)};
}

/// Total energy: kinetic plus potential m g chi . Gamma.
inline double heavy_top_energy(const HeavyTopParams& p, const HeavyTopState& s) {
    return euler_energy(p.I, s.Pi) + p.m * p.g * dot(p.chi, s.Gamma);
}

/// Lie-Poisson bracket on functions of (Pi, Gamma):
/// {f, h} = -Pi . (grad_Pi f x grad_Pi h)
///          - Gamma . (grad_Pi f x grad_Gamma h - grad_Pi h x grad_Gamma f).
/// Gradients are central differences.
inline double heavy_top_bracket(const std::function<double(const HeavyTopState&)>& f,
                                const std::function<double(const HeavyTopState&)>& h,
                                const HeavyTopState& s) {
    const auto grads = [&s](const std::function<double(const HeavyTopState&)>& fn) {
        const Vec3 gp = fd_gradient3(
            [&](const Vec3& pi) { return fn({pi, s.Gamma}); }, s.Pi);
        const Vec3 gg = fd_gradient3(
            [&](const Vec3& gamma) { return fn({s.Pi, gamma}); }, s.Gamma);
        return std::array<Vec3, 2>{gp, gg};
    };
    const auto [fp, fg] = grads(f);
    const auto [hp, hg] = grads(h);
    const double v = -dot(s.Pi, cross(fp, hp)) -
                     dot(s.Gamma, cross(fp, hg) - cross(hp, fg));
    if (!std::isfinite(v)) throw NonFiniteEvaluation("heavy_top_bracket: non-finite value");
    return v;
}

/// The heavy top recast as motion in an extended space: state
/// (Pi, Gamma, q, pv) with the charge-like momentum pv held constant and
/// q a passive integral of (pv - Gamma). With pv = -m g chi the (Pi, Gamma)
/// flow coincides with heavy_top_rhs. The Hamiltonian is
/// H = 1/2 Pi . I^{-1} Pi + 1/2 |pv - Gamma|^2 - 1/2 |Gamma|^2.
struct KkTopState {
    Vec3 Pi, Gamma, q, pv;
};

inline std::array<Vec3, 4> kk_top_rhs(const HeavyTopParams& p, const KkTopState& s) {
    const Vec3 omega = euler_omega(p.I, s.Pi);
    // grad_Gamma H = -(pv - Gamma) - Gamma = -pv, so the force term is -Gamma x pv.
    return {cross(s.Pi, omega) - cross(s.Gamma, s.pv),
            cross(s.Gamma, omega),
            s.pv - s.Gamma,
            Vec3{0.0, 0.0, 0.0}};
}

inline double kk_top_energy(const HeavyTopParams& p, const KkTopState& s) {
    return euler_energy(p.I, s.Pi) + 0.5 * norm_sq(s.pv - s.Gamma) - 0.5 * norm_sq(s.Gamma);
}

} // namespace gmech
