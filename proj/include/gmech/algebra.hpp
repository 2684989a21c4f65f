#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "gmech/errors.hpp"
#include "gmech/matn.hpp"
#include "gmech/vec3.hpp"

namespace gmech {

/// Membership test for so(n): a matrix S passes iff max|S + S^T| is within
/// tolerance. The tolerance is absolute at unit scale and scales with the
/// max-norm of S for larger matrices.
struct SkewCheck {
    double tolerance = 1e-12;

    bool passes(const MatN& s) const { return defect(s) <= scaled_tol(s); }

    double defect(const MatN& s) const {
        double d = 0.0;
        for (int i = 0; i < s.n; ++i)
            for (int j = 0; j < s.n; ++j) d = std::max(d, std::fabs(s(i, j) + s(j, i)));
        return d;
    }

    double scaled_tol(const MatN& s) const { return tolerance * std::max(1.0, s.max_abs()); }
};

/// Isomorphism R^3 -> so(3): hat(v) w = v x w for all w.
inline MatN hat(const Vec3& v) {
    MatN m(3);
    m(0, 1) = -v.z; m(0, 2) =  v.y;
    m(1, 0) =  v.z; m(1, 2) = -v.x;
    m(2, 0) = -v.y; m(2, 1) =  v.x;
    return m;
}

/// Inverse of hat. Requires a 3x3 matrix passing SkewCheck at 1e-12.
inline Vec3 unhat(const MatN& s) {
    if (s.n != 3) throw DimensionMismatch("unhat: expected a 3x3 matrix");
    if (!SkewCheck{}.passes(s)) throw NotSkew("unhat: matrix is not skew-symmetric");
    return {s(2, 1), s(0, 2), s(1, 0)};
}

/// Matrix commutator [A, B] = AB - BA.
inline MatN commutator(const MatN& x, const MatN& y) {
    require_same_dim(x, y, "commutator");
    return x * y - y * x;
}

/// Coadjoint action of so(3) on its dual: ad*_u pi = pi x u.
inline Vec3 ad_star_so3(const Vec3& u, const Vec3& pi) {
    return cross(pi, u);
}

inline double fd_default_step(double xinf) { return 1e-5 * std::max(1.0, xinf); }

/// Central-difference gradient of a scalar field on R^k. Pass h <= 0 to get
/// the default step 1e-5 * max(1, |x|_inf).
inline std::vector<double> fd_gradient(const std::function<double(const std::vector<double>&)>& f,
                                       const std::vector<double>& x, double h = 0.0) {
    if (h <= 0.0) {
        double xinf = 0.0;
        for (double v : x) xinf = std::max(xinf, std::fabs(v));
        h = fd_default_step(xinf);
    }
    std::vector<double> g(x.size());
    std::vector<double> xp = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        xp[i] = x[i] + h;
        const double fp = f(xp);
        xp[i] = x[i] - h;
        const double fm = f(xp);
        xp[i] = x[i];
        if (!std::isfinite(fp) || !std::isfinite(fm))
            throw NonFiniteEvaluation("fd_gradient: field evaluated to NaN/Inf near x[" +
                                      std::to_string(i) + "]");
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

/// fd_gradient specialized to R^3 fields.
inline Vec3 fd_gradient3(const std::function<double(const Vec3&)>& f, const Vec3& x,
                         double h = 0.0) {
    if (h <= 0.0) {
        const double xinf = std::max({std::fabs(x.x), std::fabs(x.y), std::fabs(x.z)});
        h = fd_default_step(xinf);
    }
    Vec3 g;
    for (int i = 0; i < 3; ++i) {
        Vec3 xp = x;
        xp[i] = x[i] + h;
        const double fp = f(xp);
        xp[i] = x[i] - h;
        const double fm = f(xp);
        if (!std::isfinite(fp) || !std::isfinite(fm))
            throw NonFiniteEvaluation("fd_gradient3: field evaluated to NaN/Inf");
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

} // namespace gmech
