#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "gmech/algebra.hpp"
#include "gmech/integrate.hpp"
#include "gmech/matn.hpp"
#include "gmech/vec3.hpp"

namespace gmech {

/// Principal moments of inertia, all strictly positive.
struct Inertia3 {
    double I1, I2, I3;
    Inertia3(double i1, double i2, double i3) : I1(i1), I2(i2), I3(i3) {
        if (!(i1 > 0.0 && i2 > 0.0 && i3 > 0.0))
            throw ValidationError("Inertia3: moments must be strictly positive");
    }
};

/// Diagonal shape parameters d_i of the n-dimensional body, entering the
/// inertia operator J(Omega) = D^2 Omega + Omega D^2. Requires
/// d_i^2 + d_j^2 > 0 for every pair i != j.
struct InertiaN {
    std::vector<double> d;
    explicit InertiaN(std::vector<double> dd) : d(std::move(dd)) {
        const int n = static_cast<int>(d.size());
        if (n < 2) throw ValidationError("InertiaN: need dimension >= 2");
        for (double v : d)
            if (!(v >= 0.0)) throw ValidationError("InertiaN: entries must be >= 0");
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (!(d[i] * d[i] + d[j] * d[j] > 0.0))
                    throw ValidationError("InertiaN: d_i^2 + d_j^2 must be positive");
    }
    int n() const { return static_cast<int>(d.size()); }
};

/// Canonical pair (Q, P) of the symmetric-form rigid body.
struct SymmetricState {
    MatN Q, P;
};

/// Body angular velocity Omega = I^{-1} Pi.
inline Vec3 euler_omega(const Inertia3& I, const Vec3& pi) {
    return {pi.x / I.I1, pi.y / I.I2, pi.z / I.I3};
}

/// Kinetic energy h(Pi) = 1/2 Pi . I^{-1} Pi.
inline double euler_energy(const Inertia3& I, const Vec3& pi) {
    return 0.5 * dot(pi, euler_omega(I, pi));
}

/// Euler equations: Pidot = Pi x Omega.
inline Vec3 euler_rhs(const Inertia3& I, const Vec3& pi) {
    return cross(pi, euler_omega(I, pi));
}

/// Inertia operator on so(n): J(Omega) = D^2 Omega + Omega D^2.
inline MatN son_j(const InertiaN& id, const MatN& omega) {
    if (omega.n != id.n()) throw DimensionMismatch("son_j: dimension mismatch");
    MatN m(omega.n);
    for (int i = 0; i < omega.n; ++i)
        for (int j = 0; j < omega.n; ++j)
            m(i, j) = (id.d[i] * id.d[i] + id.d[j] * id.d[j]) * omega(i, j);
    return m;
}

/// Invert J on skew matrices: Omega_ij = M_ij / (d_i^2 + d_j^2), zero diagonal.
inline MatN son_omega(const InertiaN& id, const MatN& m) {
    if (m.n != id.n()) throw DimensionMismatch("son_omega: dimension mismatch");
    if (!SkewCheck{}.passes(m)) throw NotSkew("son_omega: M is not skew-symmetric");
    MatN omega(m.n);
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j) {
            if (i == j) continue;
            omega(i, j) = m(i, j) / (id.d[i] * id.d[i] + id.d[j] * id.d[j]);
        }
    return omega;
}

/// Rigid body on so(n): Mdot = [M, Omega] with M = J(Omega).
inline MatN son_rhs(const InertiaN& id, const MatN& m) {
    return commutator(m, son_omega(id, m));
}

/// Energy of the so(n) body, -1/4 tr(M Omega); equals 1/2 Pi . Omega at n = 3.
inline double son_energy(const InertiaN& id, const MatN& m) {
    return -0.25 * (m * son_omega(id, m)).trace();
}

/// Deformed angular velocity Omega_ij = (b_i - b_j)/(a_i - a_j) M_ij.
inline MatN manakov_omega(const MatN& m, const std::vector<double>& a,
                          const std::vector<double>& b) {
    const int n = m.n;
    if (static_cast<int>(a.size()) != n || static_cast<int>(b.size()) != n)
        throw DimensionMismatch("manakov_omega: parameter size mismatch");
    if (!SkewCheck{}.passes(m)) throw NotSkew("manakov_omega: M is not skew-symmetric");
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::fabs(a[i] - a[j]) < 1e-12)
                throw DegenerateA("manakov_omega: a_i values must be pairwise distinct");
    MatN omega(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            omega(i, j) = (b[i] - b[j]) / (a[i] - a[j]) * m(i, j);
        }
    return omega;
}

/// Mdot = [M, manakov_omega(M; a, b)].
inline MatN manakov_rhs(const MatN& m, const std::vector<double>& a,
                        const std::vector<double>& b) {
    return commutator(m, manakov_omega(m, a, b));
}

/// Coefficients of the lambda-polynomials trace((M + lambda A)^k) for
/// k = 2..kmax. Entry [k-2][j] multiplies lambda^j. The expansion enumerates
/// all 2^k noncommutative words in {M, A}, so the coefficients are exact.
inline std::vector<std::vector<double>> manakov_invariants(const MatN& m, const MatN& a,
                                                           int kmax) {
    require_same_dim(m, a, "manakov_invariants");
    if (kmax < 2 || kmax > 6)
        throw ValidationError("manakov_invariants: kmax must be in [2, 6]");
    if (!SkewCheck{}.passes(m)) throw NotSkew("manakov_invariants: M is not skew-symmetric");
    const double atol = 1e-12 * std::max(1.0, a.max_abs());
    for (int i = 0; i < a.n; ++i)
        for (int j = 0; j < a.n; ++j)
            if (i != j && std::fabs(a(i, j)) > atol)
                throw ValidationError("manakov_invariants: A must be diagonal");

    std::vector<std::vector<double>> coeffs;
    for (int k = 2; k <= kmax; ++k) {
        std::vector<double> c(static_cast<std::size_t>(k) + 1, 0.0);
        for (unsigned mask = 0; mask < (1u << k); ++mask) {
            MatN word = MatN::identity(m.n);
            int apow = 0;
            for (int bit = 0; bit < k; ++bit) {
                if (mask & (1u << bit)) {
                    word = word * a;
                    ++apow;
                } else {
                    word = word * m;
                }
            }
            c[static_cast<std::size_t>(apow)] += word.trace();
        }
        coeffs.push_back(std::move(c));
    }
    return coeffs;
}

/// Symmetric-form flow: Omega = son_omega(skew(Q^T P)); Qdot = Q Omega,
/// Pdot = P Omega. The skew projection of Q^T P discards the symmetric part,
/// which is constant on the flow.
inline std::pair<MatN, MatN> symmetric_rhs(const InertiaN& id, const SymmetricState& s) {
    require_same_dim(s.Q, s.P, "symmetric_rhs");
    const MatN omega = son_omega(id, skew_part(s.Q.transpose() * s.P));
    return {s.Q * omega, s.P * omega};
}

/// Left and right momentum maps of the symmetric form,
/// J_L = (P Q^T - Q P^T)/2 and J_R = (Q^T P - P^T Q)/2.
inline std::pair<MatN, MatN> momentum_maps(const SymmetricState& s) {
    require_same_dim(s.Q, s.P, "momentum_maps");
    return {skew_part(s.P * s.Q.transpose()), skew_part(s.Q.transpose() * s.P)};
}

/// Momentum map of the cotangent-lifted rotation action: J = q x p.
inline Vec3 angular_momentum(const Vec3& q, const Vec3& p) {
    return cross(q, p);
}

/// Body angular velocity samples for reconstruction, strictly increasing in t.
struct OmegaSamples {
    std::vector<double> times;
    std::vector<Vec3> omega;

    /// Piecewise-linear interpolant, clamped to the sample range.
    Vec3 at(double t) const {
        if (times.empty()) throw ValidationError("OmegaSamples: empty");
        if (t <= times.front()) return omega.front();
        if (t >= times.back()) return omega.back();
        const auto it = std::upper_bound(times.begin(), times.end(), t);
        const std::size_t hi = static_cast<std::size_t>(it - times.begin());
        const std::size_t lo = hi - 1;
        const double w = (t - times[lo]) / (times[hi] - times[lo]);
        return (1.0 - w) * omega[lo] + w * omega[hi];
    }
};

struct RotationTrajectory {
    std::vector<double> times;
    std::vector<MatN> rotations;
    double max_orthogonality_drift = 0.0; // max |R^T R - I| over recorded states
};

namespace detail {

inline MatN mat3_from_state(const std::vector<double>& s) {
    MatN r(3);
    for (int i = 0; i < 9; ++i) r.a[static_cast<std::size_t>(i)] = s[static_cast<std::size_t>(i)];
    return r;
}

} // namespace detail

/// Integrate the reconstruction equation Rdot = R hat(Omega(t)) with RK4,
/// interpolating Omega linearly between samples. Orthogonality drift is
/// reported, never corrected.
inline RotationTrajectory reconstruct(const MatN& r0, const OmegaSamples& samples,
                                      const IntegratorConfig& cfg) {
    if (r0.n != 3) throw DimensionMismatch("reconstruct: R0 must be 3x3");
    if (max_abs_diff(r0.transpose() * r0, MatN::identity(3)) > 1e-10)
        throw NotOrthogonal("reconstruct: R0 is not orthogonal");
    if (samples.times.size() != samples.omega.size() || samples.times.empty())
        throw ValidationError("reconstruct: malformed samples");
    for (std::size_t i = 1; i < samples.times.size(); ++i)
        if (!(samples.times[i] > samples.times[i - 1]))
            throw ValidationError("reconstruct: sample times must strictly increase");
    if (cfg.t_end > samples.times.back() + 1e-12)
        throw ValidationError("reconstruct: t_end exceeds the sampled range");

    OdeSystem sys{9, [&samples](double t, const std::vector<double>& s) {
                      const MatN r = detail::mat3_from_state(s);
                      const MatN rdot = r * hat(samples.at(t));
                      return rdot.a;
                  }};
    std::vector<double> s0(r0.a);
    const Trajectory traj = integrate(sys, s0, cfg);

    RotationTrajectory out;
    out.times = traj.times;
    out.rotations.reserve(traj.states.size());
    const MatN eye = MatN::identity(3);
    for (const auto& s : traj.states) {
        MatN r = detail::mat3_from_state(s);
        out.max_orthogonality_drift =
            std::max(out.max_orthogonality_drift, max_abs_diff(r.transpose() * r, eye));
        out.rotations.push_back(std::move(r));
    }
    return out;
}

/// Free motion on GL(n): Q(t) = Q0 + V0 t, with the conserved left and right
/// momentum maps K_L = Qdot Q^T - Q Qdot^T and K_R = Qdot^T Q - Q^T Qdot.
struct EllipsoidMotion {
    MatN Q, Qdot, K_L, K_R;
};

inline EllipsoidMotion free_ellipsoid(const MatN& q0, const MatN& v0, double t) {
    require_same_dim(q0, v0, "free_ellipsoid");
    EllipsoidMotion em{q0 + t * v0, v0, MatN(q0.n), MatN(q0.n)};
    em.K_L = em.Qdot * em.Q.transpose() - em.Q * em.Qdot.transpose();
    em.K_R = em.Qdot.transpose() * em.Q - em.Q.transpose() * em.Qdot;
    return em;
}

} // namespace gmech
