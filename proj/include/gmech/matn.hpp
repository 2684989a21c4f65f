#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "gmech/errors.hpp"

namespace gmech {

/// Dense n x n real matrix, row-major storage. Dimensions in this library are
/// small (n <= 6); no attempt is made at large-scale linear algebra.
struct MatN {
    int n = 0;
    std::vector<double> a; // row-major, size n*n

    MatN() = default;
    explicit MatN(int dim) : n(dim), a(static_cast<std::size_t>(dim) * dim, 0.0) {
        if (dim < 1) throw ValidationError("MatN: dimension must be >= 1");
    }

    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }

    static MatN identity(int dim) {
        MatN m(dim);
        for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }

    static MatN diag(const std::vector<double>& d) {
        MatN m(static_cast<int>(d.size()));
        for (int i = 0; i < m.n; ++i) m(i, i) = d[static_cast<std::size_t>(i)];
        return m;
    }

    MatN transpose() const {
        MatN t(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    double trace() const {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += (*this)(i, i);
        return s;
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : a) m = std::max(m, std::fabs(v));
        return m;
    }
};

inline void require_same_dim(const MatN& x, const MatN& y, const char* where) {
    if (x.n != y.n) throw DimensionMismatch(std::string(where) + ": dimension mismatch");
}

inline MatN operator+(const MatN& x, const MatN& y) {
    require_same_dim(x, y, "MatN::operator+");
    MatN r(x.n);
    for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] = x.a[i] + y.a[i];
    return r;
}

inline MatN operator-(const MatN& x, const MatN& y) {
    require_same_dim(x, y, "MatN::operator-");
    MatN r(x.n);
    for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] = x.a[i] - y.a[i];
    return r;
}

inline MatN operator*(double s, const MatN& x) {
    MatN r(x.n);
    for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] = s * x.a[i];
    return r;
}

inline MatN operator*(const MatN& x, double s) { return s * x; }

inline MatN operator*(const MatN& x, const MatN& y) {
    require_same_dim(x, y, "MatN::operator*");
    const int n = x.n;
    MatN r(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const double xik = x(i, k);
            for (int j = 0; j < n; ++j) r(i, j) += xik * y(k, j);
        }
    return r;
}

inline double max_abs_diff(const MatN& x, const MatN& y) {
    require_same_dim(x, y, "max_abs_diff");
    double m = 0.0;
    for (std::size_t i = 0; i < x.a.size(); ++i) m = std::max(m, std::fabs(x.a[i] - y.a[i]));
    return m;
}

inline bool is_finite(const MatN& x) {
    for (double v : x.a)
        if (!std::isfinite(v)) return false;
    return true;
}

/// Skew part (X - X^T)/2.
inline MatN skew_part(const MatN& x) {
    MatN r(x.n);
    for (int i = 0; i < x.n; ++i)
        for (int j = 0; j < x.n; ++j) r(i, j) = 0.5 * (x(i, j) - x(j, i));
    return r;
}

} // namespace gmech
