#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "gmech/errors.hpp"
#include "gmech/fft.hpp"
#include "gmech/integrate.hpp"
#include "gmech/io.hpp"

namespace gmech {

/// Even interaction kernel G for the pulson ODEs. The derivative at the
/// origin is 0 for every kind, including the peakon kernel whose one-sided
/// derivatives jump; this is the even-extension convention that makes a
/// single pulson travel at constant speed.
struct GreensFunction {
    enum class Kind { peakon, compacton, gaussian };
    Kind kind = Kind::peakon;
    double scale = 1.0; // alpha for peakon, sigma for gaussian

    static GreensFunction peakon(double alpha) {
        if (!(alpha > 0.0)) throw ValidationError("GreensFunction: alpha must be positive");
        return {Kind::peakon, alpha};
    }
    static GreensFunction compacton() { return {Kind::compacton, 1.0}; }
    static GreensFunction gaussian(double sigma) {
        if (!(sigma > 0.0)) throw ValidationError("GreensFunction: sigma must be positive");
        return {Kind::gaussian, sigma};
    }

    double eval(double x) const {
        switch (kind) {
            case Kind::peakon: return std::exp(-std::fabs(x) / scale);
            case Kind::compacton: return std::max(1.0 - std::fabs(x), 0.0);
            default: return std::exp(-x * x / (2.0 * scale * scale));
        }
    }

    double deriv(double x) const {
        if (x == 0.0) return 0.0;
        switch (kind) {
            case Kind::peakon:
                return (x > 0.0 ? -1.0 : 1.0) / scale * std::exp(-std::fabs(x) / scale);
            case Kind::compacton:
                return std::fabs(x) < 1.0 ? (x > 0.0 ? -1.0 : 1.0) : 0.0;
            default:
                return -x / (scale * scale) * std::exp(-x * x / (2.0 * scale * scale));
        }
    }
};

/// N interacting pulsons with positions q and momenta p.
struct PulsonEnsemble {
    std::vector<double> q, p;
    PulsonEnsemble(std::vector<double> qq, std::vector<double> pp)
        : q(std::move(qq)), p(std::move(pp)) {
        if (q.empty() || q.size() != p.size())
            throw ValidationError("PulsonEnsemble: need N >= 1 with matching q, p sizes");
    }
    int N() const { return static_cast<int>(q.size()); }
};

/// H_N = 1/2 sum_ij p_i p_j G(q_i - q_j).
inline double pulson_hamiltonian(const GreensFunction& G, const PulsonEnsemble& e) {
    double h = 0.0;
    for (int i = 0; i < e.N(); ++i)
        for (int j = 0; j < e.N(); ++j)
            h += e.p[static_cast<std::size_t>(i)] * e.p[static_cast<std::size_t>(j)] *
                 G.eval(e.q[static_cast<std::size_t>(i)] - e.q[static_cast<std::size_t>(j)]);
    return 0.5 * h;
}

/// Canonical pulson equations:
/// qdot_i = sum_j p_j G(q_i - q_j), pdot_i = -p_i sum_j p_j G'(q_i - q_j).
inline std::pair<std::vector<double>, std::vector<double>> pulson_rhs(const GreensFunction& G,
                                                                      const PulsonEnsemble& e) {
    const int n = e.N();
    std::vector<double> qdot(static_cast<std::size_t>(n), 0.0);
    std::vector<double> pdot(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double sq = 0.0, sp = 0.0;
        for (int j = 0; j < n; ++j) {
            const double dq = e.q[static_cast<std::size_t>(i)] - e.q[static_cast<std::size_t>(j)];
            sq += e.p[static_cast<std::size_t>(j)] * G.eval(dq);
            sp += e.p[static_cast<std::size_t>(j)] * G.deriv(dq);
        }
        qdot[static_cast<std::size_t>(i)] = sq;
        pdot[static_cast<std::size_t>(i)] = -e.p[static_cast<std::size_t>(i)] * sp;
    }
    return {qdot, pdot};
}

/// u(x) = sum_i p_i G(x - q_i).
inline double velocity_field(const GreensFunction& G, const PulsonEnsemble& e, double x) {
    double u = 0.0;
    for (int i = 0; i < e.N(); ++i)
        u += e.p[static_cast<std::size_t>(i)] * G.eval(x - e.q[static_cast<std::size_t>(i)]);
    return u;
}

/// The pulson ODEs as a generic system on R^{2N}, state layout [q..., p...].
inline OdeSystem pulson_system(const GreensFunction& G, int n) {
    return OdeSystem{2 * n, [G, n](double, const std::vector<double>& s) {
                         PulsonEnsemble e(std::vector<double>(s.begin(), s.begin() + n),
                                          std::vector<double>(s.begin() + n, s.end()));
                         auto [qd, pd] = pulson_rhs(G, e);
                         std::vector<double> out;
                         out.reserve(static_cast<std::size_t>(2 * n));
                         out.insert(out.end(), qd.begin(), qd.end());
                         out.insert(out.end(), pd.begin(), pd.end());
                         return out;
                     }};
}

/// Two-pulson collision diagnostics. Integration halts cleanly if the
/// separation falls below 1e-6 (the antisymmetric head-on limit, which the
/// continuum treats analytically).
struct CollisionSummary {
    std::array<double, 2> p_in{}, p_out{};
    double min_separation = 0.0;
    double h_drift_rel = 0.0;       // relative drift of H_N over the run
    double momentum_drift_abs = 0.0; // absolute drift of p1 + p2
    bool halted = false;
    double halt_time = -1.0;
    double end_time = 0.0;
};

inline CollisionSummary pulson_collide(const GreensFunction& G, const PulsonEnsemble& e0,
                                       const IntegratorConfig& cfg) {
    if (e0.N() != 2) throw ValidationError("pulson_collide: exactly two pulsons required");
    const OdeSystem sys = pulson_system(G, 2);
    std::vector<double> s{e0.q[0], e0.q[1], e0.p[0], e0.p[1]};

    CollisionSummary cs;
    cs.p_in = {e0.p[0], e0.p[1]};
    cs.min_separation = std::fabs(e0.q[0] - e0.q[1]);
    const double h0 = pulson_hamiltonian(G, e0);
    const double mom0 = e0.p[0] + e0.p[1];

    const long long nsteps = std::max<long long>(1, std::llround(cfg.t_end / cfg.step));
    const double h = cfg.t_end / static_cast<double>(nsteps);
    double t = 0.0;
    for (long long i = 0; i < nsteps; ++i) {
        s = rk4_step(sys, t, s, h);
        t = static_cast<double>(i + 1) * h;
        const double sep = std::fabs(s[0] - s[1]);
        cs.min_separation = std::min(cs.min_separation, sep);
        const PulsonEnsemble e({s[0], s[1]}, {s[2], s[3]});
        cs.h_drift_rel = std::max(
            cs.h_drift_rel,
            std::fabs(pulson_hamiltonian(G, e) - h0) / std::max(1.0, std::fabs(h0)));
        cs.momentum_drift_abs =
            std::max(cs.momentum_drift_abs, std::fabs(s[2] + s[3] - mom0));
        if (sep < 1e-6) {
            cs.halted = true;
            cs.halt_time = t;
            break;
        }
    }
    cs.p_out = {s[2], s[3]};
    cs.end_time = t;
    return cs;
}

/// Uniform periodic grid on [-L/2, L/2) with a power-of-two point count.
struct PeriodicGrid1D {
    double L;
    int n;
    PeriodicGrid1D(double length, int points) : L(length), n(points) {
        if (!(L > 0.0)) throw ValidationError("PeriodicGrid1D: L must be positive");
        if (n < 16 || !detail::is_power_of_two(n))
            throw ValidationError("PeriodicGrid1D: n must be a power of two, >= 16");
    }
    double dx() const { return L / n; }
    double x(int i) const { return -0.5 * L + dx() * i; }
    /// Wavenumber of FFT bin j (k_j = 2 pi j' / L with j' the signed index).
    double wavenumber(int j) const {
        const int js = (j <= n / 2) ? j : j - n;
        return 2.0 * std::numbers::pi * js / L;
    }
    /// Shortest periodic distance between two points.
    double periodic_distance(double a, double b) const {
        double d = std::fmod(std::fabs(a - b), L);
        return std::min(d, L - d);
    }
};

/// Dispersive-EPDiff parameters: m = u - alpha^2 u_xx plus linear terms
/// weighted by c0 and gamma.
struct ChParams {
    double alpha = 1.0;
    double c0 = 0.0;
    double gamma = 0.0;
};

/// Solve (1 - alpha^2 d^2/dx^2) u = m spectrally: u_k = m_k / (1 + alpha^2 k^2).
inline std::vector<double> helmholtz_invert(const PeriodicGrid1D& grid,
                                            const std::vector<double>& m, double alpha) {
    if (static_cast<int>(m.size()) != grid.n)
        throw DimensionMismatch("helmholtz_invert: field size mismatch");
    auto spec = detail::fft_of_real(m);
    for (int j = 0; j < grid.n; ++j) {
        const double k = grid.wavenumber(j);
        spec[static_cast<std::size_t>(j)] /= (1.0 + alpha * alpha * k * k);
    }
    return detail::real_ifft(std::move(spec));
}

/// Apply the forward operator m = (1 - alpha^2 d^2/dx^2) u spectrally.
inline std::vector<double> helmholtz_apply(const PeriodicGrid1D& grid,
                                           const std::vector<double>& u, double alpha) {
    if (static_cast<int>(u.size()) != grid.n)
        throw DimensionMismatch("helmholtz_apply: field size mismatch");
    auto spec = detail::fft_of_real(u);
    for (int j = 0; j < grid.n; ++j) {
        const double k = grid.wavenumber(j);
        spec[static_cast<std::size_t>(j)] *= (1.0 + alpha * alpha * k * k);
    }
    return detail::real_ifft(std::move(spec));
}

/// Spectral-resolution diagnostic: fraction of spectral energy in the top
/// third of wavenumbers. `loss` flags fractions above 1%; the run continues.
struct ResolutionDiagnostic {
    double top_band_energy_fraction = 0.0;
    bool loss = false;
};

inline ResolutionDiagnostic assess_resolution(const PeriodicGrid1D& grid,
                                              const std::vector<double>& field) {
    const auto spec = detail::fft_of_real(field);
    double total = 0.0, top = 0.0;
    for (int j = 0; j < grid.n; ++j) {
        const int js = (j <= grid.n / 2) ? j : grid.n - j;
        const double e = std::norm(spec[static_cast<std::size_t>(j)]);
        total += e;
        if (3 * js > grid.n) top += e;
    }
    ResolutionDiagnostic d;
    d.top_band_energy_fraction = (total > 0.0) ? top / total : 0.0;
    d.loss = d.top_band_energy_fraction > 0.01;
    return d;
}

namespace detail {

inline void dealias_23(std::vector<std::complex<double>>& spec, int n) {
    for (int j = 0; j < n; ++j) {
        const int js = (j <= n / 2) ? j : n - j;
        if (3 * js > n) spec[static_cast<std::size_t>(j)] = 0.0;
    }
}

} // namespace detail

/// Pseudospectral right-hand side of
///   m_t = -(u m_x + 2 u_x m) - c0 u_x - gamma u_xxx,  m = u - alpha^2 u_xx,
/// with 2/3-rule dealiasing on the quadratic terms. The sign of the gamma
/// term realizes the phase velocity omega/k = (c0 - gamma k^2)/(1 + alpha^2 k^2).
inline std::vector<double> epdiff_pde_rhs(const PeriodicGrid1D& grid,
                                          const std::vector<double>& m, const ChParams& prm,
                                          ResolutionDiagnostic* diag = nullptr) {
    if (static_cast<int>(m.size()) != grid.n)
        throw DimensionMismatch("epdiff_pde_rhs: field size mismatch");
    const int n = grid.n;
    using cvec = std::vector<std::complex<double>>;
    const std::complex<double> I(0.0, 1.0);

    cvec mhat = detail::fft_of_real(m);
    if (diag) {
        double total = 0.0, top = 0.0;
        for (int j = 0; j < n; ++j) {
            const int js = (j <= n / 2) ? j : n - j;
            const double e = std::norm(mhat[static_cast<std::size_t>(j)]);
            total += e;
            if (3 * js > n) top += e;
        }
        diag->top_band_energy_fraction = (total > 0.0) ? top / total : 0.0;
        diag->loss = diag->top_band_energy_fraction > 0.01;
    }

    cvec uhat(mhat);
    for (int j = 0; j < n; ++j) {
        const double k = grid.wavenumber(j);
        uhat[static_cast<std::size_t>(j)] /= (1.0 + prm.alpha * prm.alpha * k * k);
    }

    // Dealiased factors and their spectral derivatives (Nyquist zeroed with
    // the rest of the top band).
    cvec md(mhat), ud(uhat);
    detail::dealias_23(md, n);
    detail::dealias_23(ud, n);
    cvec mxd(md), uxd(ud);
    for (int j = 0; j < n; ++j) {
        const double k = grid.wavenumber(j);
        mxd[static_cast<std::size_t>(j)] *= I * k;
        uxd[static_cast<std::size_t>(j)] *= I * k;
    }
    const std::vector<double> u_p = detail::real_ifft(std::move(ud));
    const std::vector<double> m_p = detail::real_ifft(std::move(md));
    const std::vector<double> ux_p = detail::real_ifft(std::move(uxd));
    const std::vector<double> mx_p = detail::real_ifft(std::move(mxd));

    std::vector<double> prod(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        prod[static_cast<std::size_t>(i)] =
            u_p[static_cast<std::size_t>(i)] * mx_p[static_cast<std::size_t>(i)] +
            2.0 * ux_p[static_cast<std::size_t>(i)] * m_p[static_cast<std::size_t>(i)];
    cvec phat = detail::fft_of_real(prod);
    detail::dealias_23(phat, n);

    cvec out(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double k = grid.wavenumber(j);
        const std::complex<double> uh = uhat[static_cast<std::size_t>(j)];
        // -c0 u_x - gamma u_xxx = -i k c0 u_k + i gamma k^3 u_k  (no Nyquist:
        // odd derivatives of the Nyquist bin are dropped by dealiasing below).
        std::complex<double> lin = I * k * (prm.gamma * k * k - prm.c0) * uh;
        if (j == n / 2) lin = 0.0;
        out[static_cast<std::size_t>(j)] = -phat[static_cast<std::size_t>(j)] + lin;
    }
    return detail::real_ifft(std::move(out));
}

/// The PDE as a generic ODE on the grid values of m.
inline OdeSystem epdiff_pde_system(const PeriodicGrid1D& grid, const ChParams& prm) {
    return OdeSystem{grid.n, [grid, prm](double, const std::vector<double>& m) {
                         return epdiff_pde_rhs(grid, m, prm);
                     }};
}

/// Exact spectral quadrature of int m dx on the periodic grid.
inline double momentum_integral(const PeriodicGrid1D& grid, const std::vector<double>& m) {
    double s = 0.0;
    for (double v : m) s += v;
    return s * grid.dx();
}

/// H^1-type energy 1/2 int (u^2 + alpha^2 u_x^2) dx = 1/2 int u m dx.
inline double h1_energy(const PeriodicGrid1D& grid, const std::vector<double>& m,
                        double alpha) {
    const std::vector<double> u = helmholtz_invert(grid, m, alpha);
    double s = 0.0;
    for (int i = 0; i < grid.n; ++i)
        s += u[static_cast<std::size_t>(i)] * m[static_cast<std::size_t>(i)];
    return 0.5 * s * grid.dx();
}

/// Positions of local maxima of a periodic grid function, tallest first.
inline std::vector<std::pair<double, double>> local_maxima(const PeriodicGrid1D& grid,
                                                           const std::vector<double>& u) {
    std::vector<std::pair<double, double>> peaks; // (x, height)
    for (int i = 0; i < grid.n; ++i) {
        const double prev = u[static_cast<std::size_t>((i + grid.n - 1) % grid.n)];
        const double next = u[static_cast<std::size_t>((i + 1) % grid.n)];
        const double here = u[static_cast<std::size_t>(i)];
        if (here > prev && here >= next) peaks.emplace_back(grid.x(i), here);
    }
    std::sort(peaks.begin(), peaks.end(),
              [](const auto& a, const auto& b) { return a.second > b.second; });
    return peaks;
}

namespace detail {

/// Sub-cell apex of an exponential cusp h e^{-|x - q|/alpha} given the grid
/// argmax i and its neighbors: log-heights are piecewise linear in x with
/// slopes -/+ 1/alpha, so q - x_i = (alpha/2) ln(u_{i+1}/u_{i-1}). Falls back
/// to the grid point itself when a neighbor is not positive; the correction
/// is clamped to half a cell, where the apex of a genuine argmax must lie.
inline double cusp_apex(const PeriodicGrid1D& grid, const std::vector<double>& u, int i,
                        double alpha) {
    const double up = u[static_cast<std::size_t>((i + 1) % grid.n)];
    const double um = u[static_cast<std::size_t>((i + grid.n - 1) % grid.n)];
    double d = 0.0;
    if (up > 0.0 && um > 0.0) {
        const double half = 0.5 * grid.dx();
        d = std::clamp(0.5 * alpha * std::log(up / um), -half, half);
    }
    return grid.x(i) + d;
}

} // namespace detail

/// Side-by-side run of the particle solution and the PDE from matching
/// initial data (PDE initialized by sampling u and applying the forward
/// Helmholtz operator). Peak locations are refined below the grid spacing
/// with the cusp-apex estimate before being compared.
struct ParticlePdeReport {
    std::vector<double> times;
    std::vector<double> l2_u_error;
    std::vector<double> peak_error;          // N = 1: |pde peak - q1|, periodic
    std::vector<double> particle_separation; // N = 2
    std::vector<double> pde_separation;      // N = 2
    double particle_exchange_time = -1.0;    // argmin of particle separation
    double pde_exchange_time = -1.0;         // argmin of pde peak separation
};

inline ParticlePdeReport particle_vs_pde(const GreensFunction& G, const PulsonEnsemble& e0,
                                         const PeriodicGrid1D& grid,
                                         const IntegratorConfig& cfg) {
    if (G.kind != GreensFunction::Kind::peakon)
        throw ValidationError("particle_vs_pde: the PDE fixes the peakon kernel");
    const double alpha = G.scale;
    const int n = e0.N();

    const Trajectory part = integrate(pulson_system(G, n),
                                      [&] {
                                          std::vector<double> s(e0.q);
                                          s.insert(s.end(), e0.p.begin(), e0.p.end());
                                          return s;
                                      }(),
                                      cfg);

    std::vector<double> u0(static_cast<std::size_t>(grid.n));
    for (int i = 0; i < grid.n; ++i) u0[static_cast<std::size_t>(i)] = velocity_field(G, e0, grid.x(i));
    const std::vector<double> m0 = helmholtz_apply(grid, u0, alpha);
    const Trajectory pde =
        integrate(epdiff_pde_system(grid, ChParams{alpha, 0.0, 0.0}), m0, cfg);

    ParticlePdeReport rep;
    rep.times = part.times;
    double min_sep_part = 1e300, min_sep_pde = 1e300;
    for (std::size_t r = 0; r < part.times.size(); ++r) {
        const std::vector<double>& ps = part.states[r];
        PulsonEnsemble e(std::vector<double>(ps.begin(), ps.begin() + n),
                         std::vector<double>(ps.begin() + n, ps.end()));
        const std::vector<double> u_pde = helmholtz_invert(grid, pde.states[r], alpha);
        double l2 = 0.0;
        for (int i = 0; i < grid.n; ++i) {
            const double d = u_pde[static_cast<std::size_t>(i)] - velocity_field(G, e, grid.x(i));
            l2 += d * d;
        }
        rep.l2_u_error.push_back(std::sqrt(l2 * grid.dx()));

        const auto peaks = local_maxima(grid, u_pde);
        const auto apex = [&](std::size_t which) {
            const int i = static_cast<int>(std::llround(
                              (peaks[which].first + 0.5 * grid.L) / grid.dx())) %
                          grid.n;
            return detail::cusp_apex(grid, u_pde, i, alpha);
        };
        if (n == 1) {
            rep.peak_error.push_back(
                peaks.empty() ? -1.0 : grid.periodic_distance(apex(0), e.q[0]));
        } else if (n == 2) {
            const double sp = std::fabs(e.q[0] - e.q[1]);
            rep.particle_separation.push_back(sp);
            double sd = -1.0;
            if (peaks.size() >= 2) sd = grid.periodic_distance(apex(0), apex(1));
            rep.pde_separation.push_back(sd);
            if (sp < min_sep_part) {
                min_sep_part = sp;
                rep.particle_exchange_time = part.times[r];
            }
            if (sd >= 0.0 && sd < min_sep_pde) {
                min_sep_pde = sd;
                rep.pde_exchange_time = part.times[r];
            }
        }
    }
    return rep;
}

/// Field snapshot as CSV columns (x, m, u).
inline void write_field_csv(const std::string& path, const PeriodicGrid1D& grid,
                            const std::vector<double>& m, const std::vector<double>& u) {
    std::vector<std::vector<double>> rows;
    rows.reserve(static_cast<std::size_t>(grid.n));
    for (int i = 0; i < grid.n; ++i)
        rows.push_back({grid.x(i), m[static_cast<std::size_t>(i)], u[static_cast<std::size_t>(i)]});
    write_csv(path, {"x", "m", "u"}, rows);
}

/// Particle trajectory as CSV columns (t, q1..qN, p1..pN).
inline void write_particle_csv(const std::string& path, const Trajectory& traj, int n) {
    std::vector<std::string> header{"t"};
    for (int i = 1; i <= n; ++i) header.push_back("q" + std::to_string(i));
    for (int i = 1; i <= n; ++i) header.push_back("p" + std::to_string(i));
    std::vector<std::vector<double>> rows;
    rows.reserve(traj.times.size());
    for (std::size_t r = 0; r < traj.times.size(); ++r) {
        std::vector<double> row{traj.times[r]};
        row.insert(row.end(), traj.states[r].begin(), traj.states[r].end());
        rows.push_back(std::move(row));
    }
    write_csv(path, header, rows);
}

} // namespace gmech
