#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "gmech/errors.hpp"

namespace gmech {

/// First-order ODE x' = rhs(t, x) on R^dim.
struct OdeSystem {
    int dim = 0;
    std::function<std::vector<double>(double, const std::vector<double>&)> rhs;
};

/// Fixed-step integration window. `record_every` thins the stored states;
/// the first and last states are always recorded.
struct IntegratorConfig {
    double step = 1e-3;
    double t_end = 1.0;
    int record_every = 1;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> states;
};

/// Scalar function of the state whose constancy is being monitored.
struct NamedInvariant {
    std::string name;
    std::function<double(const std::vector<double>&)> f;
};

struct InvariantDrift {
    std::string name;
    double initial = 0.0;
    double max_abs_drift = 0.0;
    double max_rel_drift = 0.0; // denominator max(1, |initial|)
};

struct DriftReport {
    std::vector<InvariantDrift> invariants;
};

namespace detail {

inline void require_finite(const std::vector<double>& v, double t, const char* where) {
    for (double x : v)
        if (!std::isfinite(x))
            throw NonFiniteState(std::string(where) + ": non-finite state at t = " +
                                     std::to_string(t),
                                 t);
}

} // namespace detail

/// One classical Runge-Kutta step of size h. Local error O(h^5) on smooth rhs.
inline std::vector<double> rk4_step(const OdeSystem& sys, double t,
                                    const std::vector<double>& x, double h) {
    if (h <= 0.0) throw ValidationError("rk4_step: step must be positive");
    const std::size_t d = x.size();
    const auto k1 = sys.rhs(t, x);
    detail::require_finite(k1, t, "rk4_step (stage 1)");
    std::vector<double> xs(d);
    for (std::size_t i = 0; i < d; ++i) xs[i] = x[i] + 0.5 * h * k1[i];
    const auto k2 = sys.rhs(t + 0.5 * h, xs);
    detail::require_finite(k2, t, "rk4_step (stage 2)");
    for (std::size_t i = 0; i < d; ++i) xs[i] = x[i] + 0.5 * h * k2[i];
    const auto k3 = sys.rhs(t + 0.5 * h, xs);
    detail::require_finite(k3, t, "rk4_step (stage 3)");
    for (std::size_t i = 0; i < d; ++i) xs[i] = x[i] + h * k3[i];
    const auto k4 = sys.rhs(t + h, xs);
    detail::require_finite(k4, t, "rk4_step (stage 4)");
    std::vector<double> out(d);
    for (std::size_t i = 0; i < d; ++i)
        out[i] = x[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

/// Integrate from t = 0 to t_end with fixed steps. The step count is
/// round(t_end/step); the step is nudged so the final time lands exactly on
/// t_end.
inline Trajectory integrate(const OdeSystem& sys, const std::vector<double>& x0,
                            const IntegratorConfig& cfg) {
    if (cfg.step <= 0.0) throw ValidationError("integrate: step must be positive");
    if (cfg.t_end <= 0.0) throw ValidationError("integrate: t_end must be positive");
    if (cfg.step > cfg.t_end) throw ValidationError("integrate: step exceeds t_end");
    if (cfg.record_every < 1) throw ValidationError("integrate: record_every must be >= 1");
    if (static_cast<int>(x0.size()) != sys.dim)
        throw ValidationError("integrate: initial state has wrong dimension");
    detail::require_finite(x0, 0.0, "integrate (initial state)");

    const long long n = std::max<long long>(1, std::llround(cfg.t_end / cfg.step));
    const double h = cfg.t_end / static_cast<double>(n);

    Trajectory traj;
    traj.times.reserve(static_cast<std::size_t>(n / cfg.record_every + 2));
    traj.states.reserve(static_cast<std::size_t>(n / cfg.record_every + 2));
    std::vector<double> x = x0;
    traj.times.push_back(0.0);
    traj.states.push_back(x);
    for (long long i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * h;
        x = rk4_step(sys, t, x, h);
        if ((i + 1) % cfg.record_every == 0 || i + 1 == n) {
            const double tn = (i + 1 == n) ? cfg.t_end : static_cast<double>(i + 1) * h;
            detail::require_finite(x, tn, "integrate");
            traj.times.push_back(tn);
            traj.states.push_back(x);
        }
    }
    return traj;
}

/// Smooth test problem with a known solution, for order measurement.
struct ReferenceProblem {
    OdeSystem sys;
    std::vector<double> x0;
    double t_end = 1.0;
    std::function<std::vector<double>(double)> exact;
};

/// Measured convergence order: least-squares slope of log(error at t_end)
/// against log(h) over the supplied steps. Needs at least 3 step sizes.
inline double convergence_order(const ReferenceProblem& p, const std::vector<double>& steps) {
    if (steps.size() < 3) throw InsufficientSteps("convergence_order: need at least 3 step sizes");
    std::vector<double> lh, le;
    const std::vector<double> ref = p.exact(p.t_end);
    for (double s : steps) {
        if (s <= 0.0) throw ValidationError("convergence_order: steps must be positive");
        IntegratorConfig cfg{s, p.t_end, 1 << 30};
        const Trajectory traj = integrate(p.sys, p.x0, cfg);
        const std::vector<double>& xf = traj.states.back();
        double err = 0.0;
        for (std::size_t i = 0; i < xf.size(); ++i)
            err = std::max(err, std::fabs(xf[i] - ref[i]));
        const long long n = std::max<long long>(1, std::llround(p.t_end / s));
        lh.push_back(std::log(p.t_end / static_cast<double>(n)));
        le.push_back(std::log(std::max(err, 1e-300)));
    }
    double mh = 0.0, me = 0.0;
    for (std::size_t i = 0; i < lh.size(); ++i) { mh += lh[i]; me += le[i]; }
    mh /= double(lh.size());
    me /= double(le.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < lh.size(); ++i) {
        num += (lh[i] - mh) * (le[i] - me);
        den += (lh[i] - mh) * (lh[i] - mh);
    }
    return num / den;
}

/// Max absolute and relative drift of each invariant over a trajectory.
inline DriftReport invariant_drift(const Trajectory& traj,
                                   const std::vector<NamedInvariant>& invariants) {
    DriftReport report;
    report.invariants.reserve(invariants.size());
    for (const auto& inv : invariants) {
        InvariantDrift d;
        d.name = inv.name;
        d.initial = inv.f(traj.states.front());
        if (!std::isfinite(d.initial))
            throw NonFiniteEvaluation("invariant_drift: '" + inv.name + "' non-finite at t0");
        for (const auto& s : traj.states) {
            const double v = inv.f(s);
            if (!std::isfinite(v))
                throw NonFiniteEvaluation("invariant_drift: '" + inv.name + "' non-finite");
            d.max_abs_drift = std::max(d.max_abs_drift, std::fabs(v - d.initial));
        }
        d.max_rel_drift = d.max_abs_drift / std::max(1.0, std::fabs(d.initial));
        report.invariants.push_back(std::move(d));
    }
    return report;
}

} // namespace gmech
