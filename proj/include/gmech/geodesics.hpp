#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "gmech/algebra.hpp"
#include "gmech/errors.hpp"
#include "gmech/matn.hpp"
#include "gmech/vec3.hpp"

namespace gmech {

/// Riemannian metric on a chart of R^dim. `dg` optionally supplies the
/// partial derivatives dg[l] = d g / d q^l; absent, central differences with
/// step 1e-5 are used.
struct MetricField {
    int dim = 0;
    std::function<MatN(const std::vector<double>&)> g;
    std::function<std::vector<MatN>(const std::vector<double>&)> dg; // optional
};

namespace detail {

/// Cholesky factor of an SPD matrix; throws SingularMetric when a pivot
/// falls below the threshold.
inline MatN cholesky(const MatN& a, double pivot_tol = 1e-10) {
    const int n = a.n;
    MatN l(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            if (i == j) {
                if (!(s > pivot_tol))
                    throw SingularMetric("metric is not positive-definite");
                l(i, i) = std::sqrt(s);
            } else {
                l(i, j) = s / l(j, j);
            }
        }
    }
    return l;
}

inline MatN spd_inverse(const MatN& a) {
    const MatN l = cholesky(a);
    const int n = a.n;
    MatN inv(n);
    // Solve L L^T x = e_c for each basis column.
    std::vector<double> y(static_cast<std::size_t>(n));
    for (int c = 0; c < n; ++c) {
        for (int i = 0; i < n; ++i) {
            double s = (i == c) ? 1.0 : 0.0;
            for (int k = 0; k < i; ++k) s -= l(i, k) * y[static_cast<std::size_t>(k)];
            y[static_cast<std::size_t>(i)] = s / l(i, i);
        }
        for (int i = n - 1; i >= 0; --i) {
            double s = y[static_cast<std::size_t>(i)];
            for (int k = i + 1; k < n; ++k) s -= l(k, i) * inv(k, c);
            inv(i, c) = s / l(i, i);
        }
    }
    return inv;
}

} // namespace detail

/// Christoffel symbols of the Levi-Civita connection,
/// Gamma^h_jk = 1/2 g^{hl} (dg_jl/dq^k + dg_kl/dq^j - dg_jk/dq^l).
struct Christoffel {
    int dim = 0;
    std::vector<double> v; // [h][j][k]
    double operator()(int h, int j, int k) const {
        return v[static_cast<std::size_t>((h * dim + j) * dim + k)];
    }
};

inline Christoffel christoffel(const MetricField& metric, const std::vector<double>& q) {
    const int n = metric.dim;
    const MatN gq = metric.g(q);
    if (gq.n != n) throw DimensionMismatch("christoffel: metric dimension mismatch");
    double asym = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) asym = std::max(asym, std::fabs(gq(i, j) - gq(j, i)));
    if (asym > 1e-12 * std::max(1.0, gq.max_abs()))
        throw SingularMetric("christoffel: metric is not symmetric");
    const MatN ginv = detail::spd_inverse(gq);

    std::vector<MatN> dg;
    if (metric.dg) {
        dg = metric.dg(q);
        if (static_cast<int>(dg.size()) != n)
            throw DimensionMismatch("christoffel: dg must supply dim matrices");
    } else {
        const double h = 1e-5;
        dg.reserve(static_cast<std::size_t>(n));
        for (int l = 0; l < n; ++l) {
            std::vector<double> qp = q, qm = q;
            qp[static_cast<std::size_t>(l)] += h;
            qm[static_cast<std::size_t>(l)] -= h;
            dg.push_back((1.0 / (2.0 * h)) * (metric.g(qp) - metric.g(qm)));
        }
    }

    Christoffel c;
    c.dim = n;
    c.v.assign(static_cast<std::size_t>(n) * n * n, 0.0);
    for (int h = 0; h < n; ++h)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double s = 0.0;
                for (int l = 0; l < n; ++l)
                    s += ginv(h, l) * (dg[static_cast<std::size_t>(k)](j, l) +
                                       dg[static_cast<std::size_t>(j)](k, l) -
                                       dg[static_cast<std::size_t>(l)](j, k));
                c.v[static_cast<std::size_t>((h * n + j) * n + k)] = 0.5 * s;
            }
    return c;
}

/// Geodesic equations: qdot = v, vdot^h = -Gamma^h_jk v^j v^k.
inline std::pair<std::vector<double>, std::vector<double>> geodesic_rhs(
    const MetricField& metric, const std::vector<double>& q, const std::vector<double>& v) {
    const Christoffel c = christoffel(metric, q);
    const int n = metric.dim;
    std::vector<double> a(static_cast<std::size_t>(n), 0.0);
    for (int h = 0; h < n; ++h) {
        double s = 0.0;
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                s += c(h, j, k) * v[static_cast<std::size_t>(j)] * v[static_cast<std::size_t>(k)];
        a[static_cast<std::size_t>(h)] = -s;
    }
    return {v, a};
}

/// Kinetic energy 1/2 g_ij v^i v^j.
inline double kinetic_energy(const MetricField& metric, const std::vector<double>& q,
                             const std::vector<double>& v) {
    const MatN gq = metric.g(q);
    double s = 0.0;
    for (int i = 0; i < metric.dim; ++i)
        for (int j = 0; j < metric.dim; ++j)
            s += gq(i, j) * v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)];
    return 0.5 * s;
}

/// Round sphere in (theta, phi): g = diag(1, sin^2 theta), analytic dg.
inline MetricField sphere_metric() {
    MetricField m;
    m.dim = 2;
    m.g = [](const std::vector<double>& q) {
        MatN g(2);
        g(0, 0) = 1.0;
        g(1, 1) = std::sin(q[0]) * std::sin(q[0]);
        return g;
    };
    m.dg = [](const std::vector<double>& q) {
        MatN d0(2);
        d0(1, 1) = 2.0 * std::sin(q[0]) * std::cos(q[0]);
        return std::vector<MatN>{d0, MatN(2)};
    };
    return m;
}

inline MetricField euclidean_metric(int dim) {
    MetricField m;
    m.dim = dim;
    m.g = [dim](const std::vector<double>&) { return MatN::identity(dim); };
    m.dg = [dim](const std::vector<double>&) {
        return std::vector<MatN>(static_cast<std::size_t>(dim), MatN(dim));
    };
    return m;
}

/// Charged particle of mass m in a static magnetic field B = curl A, with
/// coupling e_over_c. `dA` optionally supplies the Jacobian dA_i/dq_j.
struct MagneticSystem {
    double m = 1.0;
    double e_over_c = 1.0;
    std::function<Vec3(const Vec3&)> A;
    std::function<MatN(const Vec3&)> dA; // optional
    MagneticSystem(double mass, double coupling, std::function<Vec3(const Vec3&)> a,
                   std::function<MatN(const Vec3&)> da = nullptr)
        : m(mass), e_over_c(coupling), A(std::move(a)), dA(std::move(da)) {
        if (!(m > 0.0)) throw ValidationError("MagneticSystem: m must be positive");
    }
};

/// Uniform field B: A = B x q / 2, with analytic Jacobian hat(B)/2.
inline MagneticSystem uniform_field_system(double mass, double coupling, const Vec3& B) {
    return MagneticSystem(
        mass, coupling, [B](const Vec3& q) { return 0.5 * cross(B, q); },
        [B](const Vec3&) { return 0.5 * hat(B); });
}

namespace detail {

inline MatN vector_potential_jacobian(const MagneticSystem& sys, const Vec3& q) {
    if (sys.dA) return sys.dA(q);
    MatN j(3);
    const double h = fd_default_step(std::max({std::fabs(q.x), std::fabs(q.y), std::fabs(q.z)}));
    for (int col = 0; col < 3; ++col) {
        Vec3 qp = q, qm = q;
        qp[col] += h;
        qm[col] -= h;
        const Vec3 ap = sys.A(qp), am = sys.A(qm);
        for (int row = 0; row < 3; ++row) j(row, col) = (ap[row] - am[row]) / (2.0 * h);
    }
    return j;
}

} // namespace detail

/// B = curl A from the (analytic or FD) Jacobian of A.
inline Vec3 magnetic_field(const MagneticSystem& sys, const Vec3& q) {
    const MatN j = detail::vector_potential_jacobian(sys, q);
    return {j(2, 1) - j(1, 2), j(0, 2) - j(2, 0), j(1, 0) - j(0, 1)};
}

/// Newtonian form: qdot = v, vdot = (e_over_c / m) v x B(q).
inline std::pair<Vec3, Vec3> lorentz_rhs(const MagneticSystem& sys, const Vec3& q,
                                         const Vec3& v) {
    return {v, (sys.e_over_c / sys.m) * cross(v, magnetic_field(sys, q))};
}

/// Extended canonical state for the charged-particle lift: (q, p, theta, pi).
/// H = |p - pi A(q)|^2 / (2m) + pi^2 / 2; theta is cyclic so pi is constant,
/// and on the level set pi = e_over_c the (q, v) projection obeys the Lorentz
/// force law.
struct KkChargedState {
    Vec3 q, p;
    double theta = 0.0, pi = 0.0;
};

inline double kk_charged_energy(const MagneticSystem& sys, const KkChargedState& s) {
    const Vec3 rel = s.p - s.pi * sys.A(s.q);
    return norm_sq(rel) / (2.0 * sys.m) + 0.5 * s.pi * s.pi;
}

/// Canonical Hamilton equations of the extended Hamiltonian; returns
/// (qdot, pdot, thetadot, pidot) with pidot identically 0.
inline std::array<double, 8> kk_charged_rhs(const MagneticSystem& sys, const KkChargedState& s) {
    const Vec3 a = sys.A(s.q);
    const Vec3 u = (1.0 / sys.m) * (s.p - s.pi * a); // qdot
    const MatN j = detail::vector_potential_jacobian(sys, s.q);
    Vec3 pdot;
    for (int i = 0; i < 3; ++i) {
        double sum = 0.0;
        for (int l = 0; l < 3; ++l) sum += u[l] * j(l, i); // d|p - pi A|^2/dq_i
        pdot[i] = s.pi * sum;
    }
    const double thetadot = s.pi - dot(a, u);
    return {u.x, u.y, u.z, pdot.x, pdot.y, pdot.z, thetadot, 0.0};
}

/// Penalty formulation of motion constrained to the unit sphere:
/// qddot = (2/eps) (1 - |q|^2) q. Trajectories approach great circles as
/// eps -> 0.
inline std::pair<Vec3, Vec3> sphere_penalty_rhs(double eps, const Vec3& q, const Vec3& v) {
    if (!(eps > 0.0)) throw ValidationError("sphere_penalty_rhs: eps must be positive");
    return {v, (2.0 / eps) * (1.0 - norm_sq(q)) * q};
}

/// Penalty energy 1/2 |v|^2 + (1/2 eps)(1 - |q|^2)^2.
inline double sphere_penalty_energy(double eps, const Vec3& q, const Vec3& v) {
    const double c = 1.0 - norm_sq(q);
    return 0.5 * norm_sq(v) + c * c / (2.0 * eps);
}

} // namespace gmech
