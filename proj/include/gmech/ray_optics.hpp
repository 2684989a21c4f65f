#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "gmech/algebra.hpp"
#include "gmech/errors.hpp"
#include "gmech/lie_poisson.hpp"
#include "gmech/vec3.hpp"

namespace gmech {

/// Axisymmetric refractive-index profile, given as n^2 against X = |q|^2.
/// The graded-index fiber profile is n^2 = lam^2 + (mu - nu X)^2.
struct MediumProfile {
    std::function<double(double)> n2;  // required
    std::function<double(double)> dn2; // optional analytic d(n^2)/dX
    double lam = 0.0, mu = 0.0, nu = 0.0;

    static MediumProfile fiber(double lam, double mu, double nu) {
        MediumProfile m;
        m.lam = lam;
        m.mu = mu;
        m.nu = nu;
        m.n2 = [lam, mu, nu](double X) {
            const double s = mu - nu * X;
            return lam * lam + s * s;
        };
        m.dn2 = [mu, nu](double X) { return -2.0 * nu * (mu - nu * X); };
        return m;
    }

    static MediumProfile homogeneous(double n2const) {
        MediumProfile m;
        m.n2 = [n2const](double) { return n2const; };
        m.dn2 = [](double) { return 0.0; };
        return m;
    }

    double dn2_dX(double X) const {
        if (dn2) return dn2(X);
        const double h = fd_default_step(std::fabs(X));
        return (n2(X + h) - n2(X - h)) / (2.0 * h);
    }
};

/// Image-plane ray coordinates: position q and canonical momentum p.
/// Admissible states satisfy n^2(|q|^2) - |p|^2 > 0.
struct RayState4D {
    std::array<double, 2> q{};
    std::array<double, 2> p{};
};

/// Axisymmetric invariants X = |q|^2, Y = |p|^2, Z = p . q.
struct ReducedRayState {
    double X = 0.0, Y = 0.0, Z = 0.0;
};

inline double petzval_s_sq(const ReducedRayState& r) { return r.X * r.Y - r.Z * r.Z; }

/// H = -sqrt(n^2(|q|^2) - |p|^2); z plays the role of time.
inline double optical_hamiltonian(const MediumProfile& m, const RayState4D& s) {
    const double X = s.q[0] * s.q[0] + s.q[1] * s.q[1];
    const double Y = s.p[0] * s.p[0] + s.p[1] * s.p[1];
    const double disc = m.n2(X) - Y;
    if (!(disc > 0.0))
        throw GrazingIncidence("optical_hamiltonian: n^2 - |p|^2 <= 0 (grazing ray)");
    return -std::sqrt(disc);
}

/// Canonical ray equations: qdot = -p/H, pdot = (-1/2H) dn^2/dq.
inline std::pair<std::array<double, 2>, std::array<double, 2>> ray_rhs(const MediumProfile& m,
                                                                       const RayState4D& s) {
    const double H = optical_hamiltonian(m, s);
    const double X = s.q[0] * s.q[0] + s.q[1] * s.q[1];
    const double c = -m.dn2_dX(X) / H; // pdot = (-1/2H) n2'(X) 2 q
    return {{-s.p[0] / H, -s.p[1] / H}, {c * s.q[0], c * s.q[1]}};
}

/// Momentum map to the invariant coordinates.
inline ReducedRayState reduce(const RayState4D& s) {
    return {s.q[0] * s.q[0] + s.q[1] * s.q[1],
            s.p[0] * s.p[0] + s.p[1] * s.p[1],
            s.p[0] * s.q[0] + s.p[1] * s.q[1]};
}

/// Poisson structure of the reduced flow. The canonical brackets of (X, Y, Z)
/// close as {X,Y} = 4Z, {Y,Z} = -2Y, {Z,X} = -2X, which is the R^3 bracket
/// with Casimir C = 2 S^2 = 2(XY - Z^2); that normalization keeps the reduced
/// z-parameterization identical to the 4D one.
inline R3PoissonSystem reduced_ray_system(const MediumProfile& m) {
    R3PoissonSystem sys;
    sys.casimir = [](const Vec3& r) { return 2.0 * (r.x * r.y - r.z * r.z); };
    sys.grad_casimir = [](const Vec3& r) { return Vec3{2.0 * r.y, 2.0 * r.x, -4.0 * r.z}; };
    sys.hamiltonian = [m](const Vec3& r) {
        const double disc = m.n2(r.x) - r.y;
        if (!(disc > 0.0))
            throw GrazingIncidence("reduced ray hamiltonian: n^2(X) - Y <= 0");
        return -std::sqrt(disc);
    };
    sys.grad_hamiltonian = [m](const Vec3& r) {
        const double disc = m.n2(r.x) - r.y;
        if (!(disc > 0.0))
            throw GrazingIncidence("reduced ray hamiltonian: n^2(X) - Y <= 0");
        const double h = -std::sqrt(disc);
        return Vec3{m.dn2_dX(r.x) / (2.0 * h), -1.0 / (2.0 * h), 0.0};
    };
    return sys;
}

/// (Xdot, Ydot, Zdot) of the reduced flow, equal to the projection of ray_rhs.
inline Vec3 reduced_rhs(const MediumProfile& m, const ReducedRayState& r) {
    return r3_rhs(reduced_ray_system(m), {r.X, r.Y, r.Z});
}

/// Canonical Poisson bracket {F, G} on T*R^2, by central differences.
inline double canonical_bracket_fd(const std::function<double(const RayState4D&)>& F,
                                   const std::function<double(const RayState4D&)>& G,
                                   const RayState4D& s) {
    const auto grad = [&s](const std::function<double(const RayState4D&)>& fn) {
        const std::vector<double> x{s.q[0], s.q[1], s.p[0], s.p[1]};
        return fd_gradient(
            [&fn](const std::vector<double>& v) {
                return fn(RayState4D{{v[0], v[1]}, {v[2], v[3]}});
            },
            x);
    };
    const auto gf = grad(F);
    const auto gg = grad(G);
    return gf[0] * gg[2] - gf[2] * gg[0] + gf[1] * gg[3] - gf[3] * gg[1];
}

/// Verify {X,Y} = 4Z, {Y,Z} = -2Y, {Z,X} = -2X at each sample state.
struct ClosureReport {
    double max_err_xy = 0.0;
    double max_err_yz = 0.0;
    double max_err_zx = 0.0;
    double max_err() const { return std::max({max_err_xy, max_err_yz, max_err_zx}); }
};

inline ClosureReport bracket_closure_check(const std::vector<RayState4D>& samples) {
    const auto FX = [](const RayState4D& s) { return reduce(s).X; };
    const auto FY = [](const RayState4D& s) { return reduce(s).Y; };
    const auto FZ = [](const RayState4D& s) { return reduce(s).Z; };
    ClosureReport rep;
    for (const auto& s : samples) {
        const ReducedRayState r = reduce(s);
        rep.max_err_xy =
            std::max(rep.max_err_xy, std::fabs(canonical_bracket_fd(FX, FY, s) - 4.0 * r.Z));
        rep.max_err_yz =
            std::max(rep.max_err_yz, std::fabs(canonical_bracket_fd(FY, FZ, s) + 2.0 * r.Y));
        rep.max_err_zx =
            std::max(rep.max_err_zx, std::fabs(canonical_bracket_fd(FZ, FX, s) + 2.0 * r.X));
    }
    return rep;
}

/// The 4D ray equations as a generic ODE, state [q1, q2, p1, p2].
inline OdeSystem ray_system(const MediumProfile& m) {
    return OdeSystem{4, [m](double, const std::vector<double>& s) {
                         const auto [qd, pd] = ray_rhs(m, RayState4D{{s[0], s[1]}, {s[2], s[3]}});
                         return std::vector<double>{qd[0], qd[1], pd[0], pd[1]};
                     }};
}

} // namespace gmech
