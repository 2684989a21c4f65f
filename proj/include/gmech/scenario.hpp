#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "gmech/epdiff1d.hpp"
#include "gmech/errors.hpp"
#include "gmech/geodesics.hpp"
#include "gmech/heavy_top.hpp"
#include "gmech/integrate.hpp"
#include "gmech/io.hpp"
#include "gmech/lie_poisson.hpp"
#include "gmech/ray_optics.hpp"
#include "gmech/rigid_body.hpp"

namespace gmech {

/// Declarative run description, parsed from a JSON file:
/// { "system": ..., "parameters": {...}, "initial_state": [...],
///   "integrator": {"step", "t_end", "record_every"},
///   "outputs": {"trajectory_path", "report_path"} }
struct ScenarioConfig {
    std::string system;
    nlohmann::json parameters;
    std::vector<double> initial_state;
    IntegratorConfig integrator;
    std::string trajectory_path;
    std::string report_path;
};

namespace scenario_detail {

using nlohmann::json;

inline double get_num(const json& obj, const std::string& key) {
    if (!obj.contains(key) || !obj[key].is_number())
        throw ValidationError("missing or non-numeric parameter '" + key + "'");
    return obj[key].get<double>();
}

inline double get_num_or(const json& obj, const std::string& key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number())
        throw ValidationError("non-numeric parameter '" + key + "'");
    return obj[key].get<double>();
}

inline int get_int(const json& obj, const std::string& key) {
    if (!obj.contains(key) || !obj[key].is_number_integer())
        throw ValidationError("missing or non-integer parameter '" + key + "'");
    return obj[key].get<int>();
}

inline std::string get_str(const json& obj, const std::string& key) {
    if (!obj.contains(key) || !obj[key].is_string())
        throw ValidationError("missing or non-string parameter '" + key + "'");
    return obj[key].get<std::string>();
}

inline std::vector<double> get_vec(const json& obj, const std::string& key, int expect = -1) {
    if (!obj.contains(key) || !obj[key].is_array())
        throw ValidationError("missing or non-array parameter '" + key + "'");
    std::vector<double> v;
    for (const auto& e : obj[key]) {
        if (!e.is_number()) throw ValidationError("parameter '" + key + "' must be numeric");
        v.push_back(e.get<double>());
    }
    if (expect >= 0 && static_cast<int>(v.size()) != expect)
        throw ValidationError("parameter '" + key + "' must have length " +
                              std::to_string(expect));
    return v;
}

inline void expect_state_size(const ScenarioConfig& cfg, std::size_t n) {
    if (cfg.initial_state.size() != n)
        throw ValidationError("initial_state must have length " + std::to_string(n));
    for (double v : cfg.initial_state)
        if (!std::isfinite(v)) throw ValidationError("initial_state must be finite");
}

inline MatN mat_from_flat(const std::vector<double>& flat, std::size_t offset, int n) {
    MatN m(n);
    for (int i = 0; i < n * n; ++i)
        m.a[static_cast<std::size_t>(i)] = flat[offset + static_cast<std::size_t>(i)];
    return m;
}

inline std::vector<std::string> mat_columns(const std::string& prefix, int n) {
    std::vector<std::string> cols;
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            cols.push_back(prefix + "_" + std::to_string(i) + "_" + std::to_string(j));
    return cols;
}

} // namespace scenario_detail

/// Everything needed to execute one configured run.
struct BuiltScenario {
    OdeSystem sys;
    std::vector<std::string> columns; // state columns, excluding the time column
    std::vector<NamedInvariant> invariants;
    std::string time_column = "t";
    // Optional replacement runner for comparison harnesses; fills rows and
    // invariant drifts itself.
    std::function<void(const ScenarioConfig&, std::vector<std::vector<double>>& rows,
                       DriftReport& report)>
        custom_run;
    // Optional extra JSON attached to the report (e.g. collision summary).
    std::function<void(const Trajectory&, nlohmann::ordered_json&)> extra_report;
};

struct SystemInfo {
    std::string name;
    std::string parameters_doc;
    std::string state_doc;
    std::vector<std::string> invariant_names;
    std::function<BuiltScenario(const ScenarioConfig&)> build;
};

namespace scenario_detail {

inline BuiltScenario build_rigid_body3(const ScenarioConfig& cfg) {
    const Inertia3 I(get_num(cfg.parameters, "I1"), get_num(cfg.parameters, "I2"),
                     get_num(cfg.parameters, "I3"));
    expect_state_size(cfg, 3);
    BuiltScenario b;
    b.sys = OdeSystem{3, [I](double, const std::vector<double>& s) {
                          const Vec3 v = euler_rhs(I, {s[0], s[1], s[2]});
                          return std::vector<double>{v.x, v.y, v.z};
                      }};
    b.columns = {"Pi1", "Pi2", "Pi3"};
    b.invariants = {
        {"energy",
         [I](const std::vector<double>& s) { return euler_energy(I, {s[0], s[1], s[2]}); }},
        {"casimir_pi_sq",
         [](const std::vector<double>& s) { return s[0] * s[0] + s[1] * s[1] + s[2] * s[2]; }}};
    return b;
}

inline BuiltScenario build_rigid_body_son(const ScenarioConfig& cfg) {
    const InertiaN id(get_vec(cfg.parameters, "d"));
    const int n = id.n();
    expect_state_size(cfg, static_cast<std::size_t>(n) * n);
    const MatN m0 = mat_from_flat(cfg.initial_state, 0, n);
    if (!SkewCheck{1e-10}.passes(m0))
        throw ValidationError("initial M must be skew-symmetric");
    BuiltScenario b;
    b.sys = OdeSystem{n * n, [id, n](double, const std::vector<double>& s) {
                          return son_rhs(id, mat_from_flat(s, 0, n)).a;
                      }};
    b.columns = mat_columns("M", n);
    b.invariants = {
        {"energy",
         [id, n](const std::vector<double>& s) { return son_energy(id, mat_from_flat(s, 0, n)); }},
        {"trace_m_sq",
         [n](const std::vector<double>& s) {
             const MatN m = mat_from_flat(s, 0, n);
             return (m * m).trace();
         }}};
    return b;
}

inline BuiltScenario build_manakov(const ScenarioConfig& cfg) {
    const std::vector<double> a = get_vec(cfg.parameters, "a");
    const std::vector<double> bb = get_vec(cfg.parameters, "b", static_cast<int>(a.size()));
    const int n = static_cast<int>(a.size());
    if (n < 2) throw ValidationError("manakov: need dimension >= 2");
    expect_state_size(cfg, static_cast<std::size_t>(n) * n);
    const MatN m0 = mat_from_flat(cfg.initial_state, 0, n);
    if (!SkewCheck{1e-10}.passes(m0))
        throw ValidationError("initial M must be skew-symmetric");
    manakov_omega(m0, a, bb); // validates distinct a_i up front

    BuiltScenario b;
    b.sys = OdeSystem{n * n, [a, bb, n](double, const std::vector<double>& s) {
                          return manakov_rhs(mat_from_flat(s, 0, n), a, bb).a;
                      }};
    b.columns = mat_columns("M", n);
    const MatN A = MatN::diag(a);
    for (int k = 2; k <= 4; ++k)
        for (int c = 0; c <= k; ++c)
            b.invariants.push_back(
                {"k" + std::to_string(k) + "_c" + std::to_string(c),
                 [A, n, k, c](const std::vector<double>& s) {
                     const auto coeffs = manakov_invariants(mat_from_flat(s, 0, n), A, k);
                     return coeffs[static_cast<std::size_t>(k - 2)][static_cast<std::size_t>(c)];
                 }});
    return b;
}

inline BuiltScenario build_symmetric_rb(const ScenarioConfig& cfg) {
    const InertiaN id(get_vec(cfg.parameters, "d"));
    const int n = id.n();
    expect_state_size(cfg, 2 * static_cast<std::size_t>(n) * n);
    BuiltScenario b;
    const std::size_t nn = static_cast<std::size_t>(n) * n;
    b.sys = OdeSystem{2 * n * n, [id, n, nn](double, const std::vector<double>& s) {
                          const SymmetricState st{mat_from_flat(s, 0, n), mat_from_flat(s, nn, n)};
                          const auto [qd, pd] = symmetric_rhs(id, st);
                          std::vector<double> out(qd.a);
                          out.insert(out.end(), pd.a.begin(), pd.a.end());
                          return out;
                      }};
    b.columns = mat_columns("Q", n);
    const auto pcols = mat_columns("P", n);
    b.columns.insert(b.columns.end(), pcols.begin(), pcols.end());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            b.invariants.push_back(
                {"J_L_" + std::to_string(i + 1) + "_" + std::to_string(j + 1),
                 [n, nn, i, j](const std::vector<double>& s) {
                     const SymmetricState st{mat_from_flat(s, 0, n), mat_from_flat(s, nn, n)};
                     return momentum_maps(st).first(i, j);
                 }});
    b.invariants.push_back({"energy", [id, n, nn](const std::vector<double>& s) {
                                const SymmetricState st{mat_from_flat(s, 0, n),
                                                        mat_from_flat(s, nn, n)};
                                const MatN m = skew_part(st.Q.transpose() * st.P);
                                return son_energy(id, m);
                            }});
    return b;
}

inline HeavyTopParams heavy_top_params(const nlohmann::json& p) {
    const std::vector<double> chi = get_vec(p, "chi", 3);
    return HeavyTopParams(
        Inertia3(get_num(p, "I1"), get_num(p, "I2"), get_num(p, "I3")), get_num(p, "m"),
        get_num(p, "g"), Vec3{chi[0], chi[1], chi[2]});
}

inline void expect_unit_gamma(const std::vector<double>& s, std::size_t offset) {
    const Vec3 gamma{s[offset], s[offset + 1], s[offset + 2]};
    if (std::fabs(norm(gamma) - 1.0) > 1e-12)
        throw ValidationError("initial Gamma must be a unit vector (|Gamma| - 1 within 1e-12)");
}

inline BuiltScenario build_heavy_top(const ScenarioConfig& cfg) {
    const HeavyTopParams prm = heavy_top_params(cfg.parameters);
    expect_state_size(cfg, 6);
    expect_unit_gamma(cfg.initial_state, 3);
    BuiltScenario b;
    b.sys = OdeSystem{6, [prm](double, const std::vector<double>& s) {
                          const auto [pd, gd] =
                              heavy_top_rhs(prm, {{s[0], s[1], s[2]}, {s[3], s[4], s[5]}});
                          return std::vector<double>{pd.x, pd.y, pd.z, gd.x, gd.y, gd.z};
                      }};
    b.columns = {"Pi1", "Pi2", "Pi3", "Gamma1", "Gamma2", "Gamma3"};
    b.invariants = {
        {"energy",
         [prm](const std::vector<double>& s) {
             return heavy_top_energy(prm, {{s[0], s[1], s[2]}, {s[3], s[4], s[5]}});
         }},
        {"gamma_sq",
         [](const std::vector<double>& s) { return s[3] * s[3] + s[4] * s[4] + s[5] * s[5]; }},
        {"pi_dot_gamma",
         [](const std::vector<double>& s) { return s[0] * s[3] + s[1] * s[4] + s[2] * s[5]; }}};
    return b;
}

inline BuiltScenario build_heavy_top_kk(const ScenarioConfig& cfg) {
    const HeavyTopParams prm = heavy_top_params(cfg.parameters);
    expect_state_size(cfg, 12);
    expect_unit_gamma(cfg.initial_state, 3);
    const auto unpack = [](const std::vector<double>& s) {
        return KkTopState{{s[0], s[1], s[2]},
                          {s[3], s[4], s[5]},
                          {s[6], s[7], s[8]},
                          {s[9], s[10], s[11]}};
    };
    BuiltScenario b;
    b.sys = OdeSystem{12, [prm, unpack](double, const std::vector<double>& s) {
                          const auto d = kk_top_rhs(prm, unpack(s));
                          std::vector<double> out;
                          out.reserve(12);
                          for (const Vec3& v : d) {
                              out.push_back(v.x);
                              out.push_back(v.y);
                              out.push_back(v.z);
                          }
                          return out;
                      }};
    b.columns = {"Pi1", "Pi2", "Pi3", "Gamma1", "Gamma2", "Gamma3",
                 "q1",  "q2",  "q3",  "pv1",    "pv2",    "pv3"};
    b.invariants = {{"kk_energy",
                     [prm, unpack](const std::vector<double>& s) {
                         return kk_top_energy(prm, unpack(s));
                     }},
                    {"gamma_sq",
                     [](const std::vector<double>& s) {
                         return s[3] * s[3] + s[4] * s[4] + s[5] * s[5];
                     }},
                    {"pi_dot_gamma",
                     [](const std::vector<double>& s) {
                         return s[0] * s[3] + s[1] * s[4] + s[2] * s[5];
                     }},
                    {"pv1", [](const std::vector<double>& s) { return s[9]; }},
                    {"pv2", [](const std::vector<double>& s) { return s[10]; }},
                    {"pv3", [](const std::vector<double>& s) { return s[11]; }}};
    return b;
}

inline GreensFunction kernel_from_params(const nlohmann::json& p) {
    const std::string kind = get_str(p, "kernel");
    if (kind == "peakon") return GreensFunction::peakon(get_num(p, "alpha"));
    if (kind == "compacton") return GreensFunction::compacton();
    if (kind == "gaussian") return GreensFunction::gaussian(get_num(p, "sigma"));
    throw ValidationError("kernel must be one of peakon, compacton, gaussian");
}

inline BuiltScenario build_pulsons(const ScenarioConfig& cfg) {
    const GreensFunction G = kernel_from_params(cfg.parameters);
    if (cfg.initial_state.size() % 2 != 0 || cfg.initial_state.empty())
        throw ValidationError("initial_state must be [q1..qN, p1..pN]");
    const int n = static_cast<int>(cfg.initial_state.size() / 2);
    BuiltScenario b;
    b.sys = pulson_system(G, n);
    for (int i = 1; i <= n; ++i) b.columns.push_back("q" + std::to_string(i));
    for (int i = 1; i <= n; ++i) b.columns.push_back("p" + std::to_string(i));
    b.invariants = {{"hamiltonian",
                     [G, n](const std::vector<double>& s) {
                         return pulson_hamiltonian(
                             G, PulsonEnsemble(std::vector<double>(s.begin(), s.begin() + n),
                                               std::vector<double>(s.begin() + n, s.end())));
                     }},
                    {"total_momentum", [n](const std::vector<double>& s) {
                         double t = 0.0;
                         for (int i = 0; i < n; ++i) t += s[static_cast<std::size_t>(n + i)];
                         return t;
                     }}};
    if (n == 2) {
        b.extra_report = [](const Trajectory& traj, nlohmann::ordered_json& rep) {
            double min_sep = 1e300;
            for (const auto& s : traj.states)
                min_sep = std::min(min_sep, std::fabs(s[0] - s[1]));
            const auto& first = traj.states.front();
            const auto& last = traj.states.back();
            rep["collision"] = {{"p_in", {first[2], first[3]}},
                                {"p_out", {last[2], last[3]}},
                                {"min_separation", min_sep}};
        };
    }
    return b;
}

/// Builds the grid samples of m at t = 0, either from initial_state directly
/// or from the 'ic' parameterization (superposed peakons, or a sine in m).
inline std::vector<double> epdiff_initial_state(const ScenarioConfig& cfg) {
    const double alpha = get_num(cfg.parameters, "alpha");
    const PeriodicGrid1D grid(get_num(cfg.parameters, "L"), get_int(cfg.parameters, "n"));
    if (!cfg.initial_state.empty()) {
        expect_state_size(cfg, static_cast<std::size_t>(grid.n));
        return cfg.initial_state;
    }
    const std::string ic = get_str(cfg.parameters, "ic");
    if (ic == "peakons") {
        const std::vector<double> q0 = get_vec(cfg.parameters, "q0");
        const std::vector<double> p0 = get_vec(cfg.parameters, "p0", static_cast<int>(q0.size()));
        const GreensFunction G = GreensFunction::peakon(alpha);
        const PulsonEnsemble e(q0, p0);
        std::vector<double> u0(static_cast<std::size_t>(grid.n));
        for (int i = 0; i < grid.n; ++i)
            u0[static_cast<std::size_t>(i)] = velocity_field(G, e, grid.x(i));
        return helmholtz_apply(grid, u0, alpha);
    }
    if (ic == "sine") {
        const double amp = get_num(cfg.parameters, "amplitude");
        const int mode = get_int(cfg.parameters, "mode");
        std::vector<double> m0(static_cast<std::size_t>(grid.n));
        for (int i = 0; i < grid.n; ++i)
            m0[static_cast<std::size_t>(i)] =
                amp * std::sin(2.0 * std::numbers::pi * mode * grid.x(i) / grid.L);
        return m0;
    }
    throw ValidationError("ic must be 'peakons' or 'sine' (or give initial_state)");
}

inline BuiltScenario build_epdiff_pde(const ScenarioConfig& cfg) {
    const ChParams prm{get_num(cfg.parameters, "alpha"),
                       get_num_or(cfg.parameters, "c0", 0.0),
                       get_num_or(cfg.parameters, "gamma", 0.0)};
    if (!(prm.alpha > 0.0)) throw ValidationError("alpha must be positive");
    const PeriodicGrid1D grid(get_num(cfg.parameters, "L"), get_int(cfg.parameters, "n"));
    epdiff_initial_state(cfg); // validates the initial data up front

    BuiltScenario b;
    b.sys = epdiff_pde_system(grid, prm);
    for (int i = 0; i < grid.n; ++i) b.columns.push_back("m" + std::to_string(i));
    b.invariants = {{"momentum_integral",
                     [grid](const std::vector<double>& m) { return momentum_integral(grid, m); }},
                    {"h1_energy", [grid, prm](const std::vector<double>& m) {
                         return h1_energy(grid, m, prm.alpha);
                     }}};
    return b;
}

inline BuiltScenario build_particle_vs_pde(const ScenarioConfig& cfg) {
    const double alpha = get_num(cfg.parameters, "alpha");
    const PeriodicGrid1D grid(get_num(cfg.parameters, "L"), get_int(cfg.parameters, "n"));
    if (cfg.initial_state.size() != 2 && cfg.initial_state.size() != 4)
        throw ValidationError("initial_state must be [q.., p..] with N = 1 or 2");
    const int n = static_cast<int>(cfg.initial_state.size() / 2);
    const GreensFunction G = GreensFunction::peakon(alpha);
    const PulsonEnsemble e0(
        std::vector<double>(cfg.initial_state.begin(), cfg.initial_state.begin() + n),
        std::vector<double>(cfg.initial_state.begin() + n, cfg.initial_state.end()));

    BuiltScenario b;
    for (int i = 1; i <= n; ++i) b.columns.push_back("q" + std::to_string(i));
    for (int i = 1; i <= n; ++i) b.columns.push_back("p" + std::to_string(i));
    if (n == 1) {
        b.columns.push_back("pde_peak_error");
    } else {
        b.columns.push_back("sep_particle");
        b.columns.push_back("sep_pde");
    }
    b.columns.push_back("l2_u_error");

    b.custom_run = [G, e0, grid, n](const ScenarioConfig& c,
                                    std::vector<std::vector<double>>& rows, DriftReport& rep) {
        const Trajectory part = integrate(pulson_system(G, n),
                                          [&] {
                                              std::vector<double> s(e0.q);
                                              s.insert(s.end(), e0.p.begin(), e0.p.end());
                                              return s;
                                          }(),
                                          c.integrator);
        const ParticlePdeReport r = particle_vs_pde(G, e0, grid, c.integrator);
        for (std::size_t i = 0; i < r.times.size(); ++i) {
            std::vector<double> row{r.times[i]};
            row.insert(row.end(), part.states[i].begin(), part.states[i].end());
            if (n == 1) {
                row.push_back(r.peak_error[i]);
            } else {
                row.push_back(r.particle_separation[i]);
                row.push_back(r.pde_separation[i]);
            }
            row.push_back(r.l2_u_error[i]);
            rows.push_back(std::move(row));
        }
        rep = invariant_drift(
            part,
            {{"hamiltonian",
              [G, n](const std::vector<double>& s) {
                  return pulson_hamiltonian(
                      G, PulsonEnsemble(std::vector<double>(s.begin(), s.begin() + n),
                                        std::vector<double>(s.begin() + n, s.end())));
              }},
             {"total_momentum", [n](const std::vector<double>& s) {
                  double t = 0.0;
                  for (int i = 0; i < n; ++i) t += s[static_cast<std::size_t>(n + i)];
                  return t;
              }}});
    };
    b.invariants = {}; // reported by custom_run
    return b;
}

inline MediumProfile medium_from_params(const nlohmann::json& p) {
    return MediumProfile::fiber(get_num_or(p, "lam", 0.9), get_num_or(p, "mu", 1.0),
                                get_num_or(p, "nu", 0.1));
}

inline BuiltScenario build_ray4d(const ScenarioConfig& cfg) {
    const MediumProfile medium = medium_from_params(cfg.parameters);
    expect_state_size(cfg, 4);
    const RayState4D s0{{cfg.initial_state[0], cfg.initial_state[1]},
                        {cfg.initial_state[2], cfg.initial_state[3]}};
    optical_hamiltonian(medium, s0); // throws GrazingIncidence if inadmissible
    BuiltScenario b;
    b.sys = ray_system(medium);
    b.time_column = "z";
    b.columns = {"q1", "q2", "p1", "p2"};
    b.invariants = {
        {"hamiltonian",
         [medium](const std::vector<double>& s) {
             return optical_hamiltonian(medium, RayState4D{{s[0], s[1]}, {s[2], s[3]}});
         }},
        {"p_phi", [](const std::vector<double>& s) { return s[2] * s[1] - s[3] * s[0]; }},
        {"petzval_s_sq", [](const std::vector<double>& s) {
             return petzval_s_sq(reduce(RayState4D{{s[0], s[1]}, {s[2], s[3]}}));
         }}};
    return b;
}

inline BuiltScenario build_ray_reduced(const ScenarioConfig& cfg) {
    const MediumProfile medium = medium_from_params(cfg.parameters);
    expect_state_size(cfg, 3);
    const double X = cfg.initial_state[0], Y = cfg.initial_state[1], Z = cfg.initial_state[2];
    if (X < 0.0 || Y < 0.0) throw ValidationError("X and Y must be nonnegative");
    if (X * Y - Z * Z < -1e-12) throw ValidationError("XY - Z^2 must be nonnegative");
    if (!(medium.n2(X) - Y > 0.0)) throw ValidationError("grazing state: n^2(X) - Y <= 0");
    BuiltScenario b;
    const R3PoissonSystem sys = reduced_ray_system(medium);
    b.sys = r3_system(sys);
    b.time_column = "z";
    b.columns = {"X", "Y", "Z"};
    b.invariants = {
        {"petzval_s_sq",
         [](const std::vector<double>& s) { return s[0] * s[1] - s[2] * s[2]; }},
        {"hamiltonian", [medium](const std::vector<double>& s) {
             return -std::sqrt(medium.n2(s[0]) - s[1]);
         }}};
    return b;
}

inline BuiltScenario build_geodesic(const ScenarioConfig& cfg) {
    const std::string kind = get_str(cfg.parameters, "metric");
    MetricField metric;
    if (kind == "sphere") {
        metric = sphere_metric();
    } else if (kind == "euclidean") {
        metric = euclidean_metric(get_int(cfg.parameters, "dim"));
    } else {
        throw ValidationError("metric must be 'sphere' or 'euclidean'");
    }
    const int k = metric.dim;
    expect_state_size(cfg, 2 * static_cast<std::size_t>(k));
    {
        // Validate the metric at the initial point (SPD check).
        std::vector<double> q0(cfg.initial_state.begin(), cfg.initial_state.begin() + k);
        christoffel(metric, q0);
    }
    BuiltScenario b;
    b.sys = OdeSystem{2 * k, [metric, k](double, const std::vector<double>& s) {
                          const std::vector<double> q(s.begin(), s.begin() + k);
                          const std::vector<double> v(s.begin() + k, s.end());
                          auto [qd, vd] = geodesic_rhs(metric, q, v);
                          std::vector<double> out(std::move(qd));
                          out.insert(out.end(), vd.begin(), vd.end());
                          return out;
                      }};
    for (int i = 1; i <= k; ++i) b.columns.push_back("q" + std::to_string(i));
    for (int i = 1; i <= k; ++i) b.columns.push_back("v" + std::to_string(i));
    b.invariants = {{"kinetic_energy", [metric, k](const std::vector<double>& s) {
                         return kinetic_energy(metric,
                                               std::vector<double>(s.begin(), s.begin() + k),
                                               std::vector<double>(s.begin() + k, s.end()));
                     }}};
    return b;
}

inline BuiltScenario build_lorentz(const ScenarioConfig& cfg) {
    const std::vector<double> bvec = get_vec(cfg.parameters, "B", 3);
    const MagneticSystem sys = uniform_field_system(
        get_num(cfg.parameters, "m"), get_num(cfg.parameters, "e_over_c"),
        Vec3{bvec[0], bvec[1], bvec[2]});
    expect_state_size(cfg, 6);
    BuiltScenario b;
    b.sys = OdeSystem{6, [sys](double, const std::vector<double>& s) {
                          const auto [qd, vd] =
                              lorentz_rhs(sys, {s[0], s[1], s[2]}, {s[3], s[4], s[5]});
                          return std::vector<double>{qd.x, qd.y, qd.z, vd.x, vd.y, vd.z};
                      }};
    b.columns = {"q1", "q2", "q3", "v1", "v2", "v3"};
    const double mass = sys.m;
    b.invariants = {
        {"speed_sq",
         [](const std::vector<double>& s) { return s[3] * s[3] + s[4] * s[4] + s[5] * s[5]; }},
        {"kinetic_energy", [mass](const std::vector<double>& s) {
             return 0.5 * mass * (s[3] * s[3] + s[4] * s[4] + s[5] * s[5]);
         }}};
    return b;
}

inline BuiltScenario build_kk_charged(const ScenarioConfig& cfg) {
    const std::vector<double> bvec = get_vec(cfg.parameters, "B", 3);
    expect_state_size(cfg, 8);
    const MagneticSystem sys = uniform_field_system(
        get_num(cfg.parameters, "m"), cfg.initial_state[7], Vec3{bvec[0], bvec[1], bvec[2]});
    const auto unpack = [](const std::vector<double>& s) {
        return KkChargedState{{s[0], s[1], s[2]}, {s[3], s[4], s[5]}, s[6], s[7]};
    };
    BuiltScenario b;
    b.sys = OdeSystem{8, [sys, unpack](double, const std::vector<double>& s) {
                          const auto d = kk_charged_rhs(sys, unpack(s));
                          return std::vector<double>(d.begin(), d.end());
                      }};
    b.columns = {"q1", "q2", "q3", "p1", "p2", "p3", "theta", "pi"};
    b.invariants = {{"kk_energy",
                     [sys, unpack](const std::vector<double>& s) {
                         return kk_charged_energy(sys, unpack(s));
                     }},
                    {"pi", [](const std::vector<double>& s) { return s[7]; }}};
    return b;
}

inline BuiltScenario build_free_ellipsoid(const ScenarioConfig& cfg) {
    const int n = get_int(cfg.parameters, "n");
    if (n < 2) throw ValidationError("free_ellipsoid: need n >= 2");
    const std::size_t nn = static_cast<std::size_t>(n) * n;
    expect_state_size(cfg, 2 * nn);
    BuiltScenario b;
    b.sys = OdeSystem{2 * n * n, [nn](double, const std::vector<double>& s) {
                          // Qdot = V, Vdot = 0: free motion, exact under RK4.
                          std::vector<double> out(s.begin() + static_cast<std::ptrdiff_t>(nn),
                                                  s.end());
                          out.resize(2 * nn, 0.0);
                          return out;
                      }};
    b.columns = mat_columns("Q", n);
    const auto vcols = mat_columns("V", n);
    b.columns.insert(b.columns.end(), vcols.begin(), vcols.end());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            b.invariants.push_back(
                {"K_L_" + std::to_string(i + 1) + "_" + std::to_string(j + 1),
                 [n, nn, i, j](const std::vector<double>& s) {
                     const MatN q = mat_from_flat(s, 0, n);
                     const MatN v = mat_from_flat(s, nn, n);
                     return (v * q.transpose() - q * v.transpose())(i, j);
                 }});
            b.invariants.push_back(
                {"K_R_" + std::to_string(i + 1) + "_" + std::to_string(j + 1),
                 [n, nn, i, j](const std::vector<double>& s) {
                     const MatN q = mat_from_flat(s, 0, n);
                     const MatN v = mat_from_flat(s, nn, n);
                     return (v.transpose() * q - q.transpose() * v)(i, j);
                 }});
        }
    return b;
}

} // namespace scenario_detail

/// Registry of every runnable system.
inline const std::vector<SystemInfo>& system_registry() {
    static const std::vector<SystemInfo> registry = {
        {"rigid_body3", "I1, I2, I3", "Pi1..Pi3", {"energy", "casimir_pi_sq"},
         scenario_detail::build_rigid_body3},
        {"rigid_body_son", "d (array of n >= 2 reals)", "M row-major (n*n, skew)",
         {"energy", "trace_m_sq"}, scenario_detail::build_rigid_body_son},
        {"manakov", "a, b (arrays, a pairwise distinct)", "M row-major (n*n, skew)",
         {"k2_c0..k2_c2", "k3_c0..k3_c3", "k4_c0..k4_c4"}, scenario_detail::build_manakov},
        {"symmetric_rb", "d (array)", "Q then P, row-major", {"J_L_i_j", "energy"},
         scenario_detail::build_symmetric_rb},
        {"heavy_top", "I1, I2, I3, m, g, chi", "Pi1..3, Gamma1..3",
         {"energy", "gamma_sq", "pi_dot_gamma"}, scenario_detail::build_heavy_top},
        {"heavy_top_kk", "I1, I2, I3, m, g, chi", "Pi, Gamma, q, pv (12 numbers)",
         {"kk_energy", "gamma_sq", "pi_dot_gamma", "pv1", "pv2", "pv3"},
         scenario_detail::build_heavy_top_kk},
        {"pulsons", "kernel (peakon|compacton|gaussian), alpha or sigma",
         "q1..qN, p1..pN", {"hamiltonian", "total_momentum"}, scenario_detail::build_pulsons},
        {"epdiff_pde", "alpha, c0, gamma, L, n, ic (peakons: q0, p0; sine: amplitude, mode)",
         "m on the grid (or empty to build from ic)", {"momentum_integral", "h1_energy"},
         scenario_detail::build_epdiff_pde},
        {"particle_vs_pde", "alpha, L, n", "q1..qN, p1..pN (N = 1 or 2)",
         {"hamiltonian", "total_momentum"}, scenario_detail::build_particle_vs_pde},
        {"ray4d", "lam, mu, nu", "q1, q2, p1, p2",
         {"hamiltonian", "p_phi", "petzval_s_sq"}, scenario_detail::build_ray4d},
        {"ray_reduced", "lam, mu, nu", "X, Y, Z", {"petzval_s_sq", "hamiltonian"},
         scenario_detail::build_ray_reduced},
        {"geodesic", "metric (sphere|euclidean), dim (euclidean)", "q1..qk, v1..vk",
         {"kinetic_energy"}, scenario_detail::build_geodesic},
        {"lorentz", "m, e_over_c, B (array of 3)", "q1..3, v1..3",
         {"speed_sq", "kinetic_energy"}, scenario_detail::build_lorentz},
        {"kk_charged", "m, B (array of 3)", "q1..3, p1..3, theta, pi",
         {"kk_energy", "pi"}, scenario_detail::build_kk_charged},
        {"free_ellipsoid", "n", "Q then V, row-major", {"K_L_i_j", "K_R_i_j"},
         scenario_detail::build_free_ellipsoid},
    };
    return registry;
}

inline const SystemInfo* find_system(const std::string& name) {
    for (const auto& s : system_registry())
        if (s.name == name) return &s;
    return nullptr;
}

/// Parse and validate a config JSON document.
inline ScenarioConfig parse_scenario_config(const nlohmann::json& j) {
    using scenario_detail::get_num;
    ScenarioConfig cfg;
    if (!j.is_object()) throw ValidationError("config must be a JSON object");
    if (!j.contains("system") || !j["system"].is_string())
        throw ValidationError("config needs a string 'system'");
    cfg.system = j["system"].get<std::string>();
    cfg.parameters = j.value("parameters", nlohmann::json::object());
    if (!cfg.parameters.is_object()) throw ValidationError("'parameters' must be an object");
    if (j.contains("initial_state")) {
        if (!j["initial_state"].is_array())
            throw ValidationError("'initial_state' must be an array");
        for (const auto& e : j["initial_state"]) {
            if (!e.is_number()) throw ValidationError("'initial_state' must be numeric");
            cfg.initial_state.push_back(e.get<double>());
        }
    }
    if (!j.contains("integrator") || !j["integrator"].is_object())
        throw ValidationError("config needs an 'integrator' object");
    const auto& ji = j["integrator"];
    cfg.integrator.step = get_num(ji, "step");
    cfg.integrator.t_end = get_num(ji, "t_end");
    cfg.integrator.record_every = static_cast<int>(scenario_detail::get_num_or(ji, "record_every", 1.0));
    if (!(cfg.integrator.step > 0.0)) throw ValidationError("integrator.step must be positive");
    if (!(cfg.integrator.t_end > 0.0)) throw ValidationError("integrator.t_end must be positive");
    if (cfg.integrator.step > cfg.integrator.t_end)
        throw ValidationError("integrator.step must not exceed t_end");
    if (cfg.integrator.record_every < 1)
        throw ValidationError("integrator.record_every must be >= 1");
    if (!j.contains("outputs") || !j["outputs"].is_object())
        throw ValidationError("config needs an 'outputs' object");
    cfg.trajectory_path = scenario_detail::get_str(j["outputs"], "trajectory_path");
    cfg.report_path = scenario_detail::get_str(j["outputs"], "report_path");
    return cfg;
}

/// Run one scenario config file. Relative output paths are resolved against
/// `outdir` when it is nonempty. Returns the process exit code contract:
/// 0 success, 2 validation failure, 3 runtime (non-finite or inadmissible
/// state) failure. One-line diagnostics go to `err`.
inline int run_scenario(const std::string& config_path, const std::string& outdir = "",
                        std::ostream& err = std::cerr) {
    ScenarioConfig cfg;
    BuiltScenario built;
    std::vector<double> x0;
    try {
        std::ifstream in(config_path);
        if (!in) throw ValidationError("cannot open config '" + config_path + "'");
        nlohmann::json j = nlohmann::json::parse(in, nullptr, true, true);
        cfg = parse_scenario_config(j);
        const SystemInfo* info = find_system(cfg.system);
        if (!info) throw ValidationError("unknown system '" + cfg.system + "'");
        built = info->build(cfg);
        x0 = (cfg.system == "epdiff_pde") ? scenario_detail::epdiff_initial_state(cfg)
                                          : cfg.initial_state;
        if (!outdir.empty()) {
            const auto resolve = [&outdir](std::string& p) {
                if (!p.empty() && p.front() != '/') p = outdir + "/" + p;
            };
            resolve(cfg.trajectory_path);
            resolve(cfg.report_path);
        }
    } catch (const nlohmann::json::exception& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    }

    try {
        const auto t_start = std::chrono::steady_clock::now();
        std::vector<std::vector<double>> rows;
        DriftReport drift;
        nlohmann::ordered_json rep;
        rep["system"] = cfg.system;
        if (built.custom_run) {
            built.custom_run(cfg, rows, drift);
        } else {
            const Trajectory traj = integrate(built.sys, x0, cfg.integrator);
            drift = invariant_drift(traj, built.invariants);
            rows.reserve(traj.times.size());
            for (std::size_t r = 0; r < traj.times.size(); ++r) {
                std::vector<double> row{traj.times[r]};
                row.insert(row.end(), traj.states[r].begin(), traj.states[r].end());
                rows.push_back(std::move(row));
            }
            if (built.extra_report) built.extra_report(traj, rep);
        }
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

        for (const std::string& p : {cfg.trajectory_path, cfg.report_path}) {
            const auto parent = std::filesystem::path(p).parent_path();
            if (!parent.empty()) std::filesystem::create_directories(parent);
        }
        std::vector<std::string> header{built.time_column};
        header.insert(header.end(), built.columns.begin(), built.columns.end());
        write_csv(cfg.trajectory_path, header, rows);

        rep["invariants"] = nlohmann::ordered_json::array();
        for (const auto& inv : drift.invariants)
            rep["invariants"].push_back({{"name", inv.name},
                                         {"initial", inv.initial},
                                         {"max_abs_drift", inv.max_abs_drift},
                                         {"max_rel_drift", inv.max_rel_drift}});
        rep["wall_time_seconds"] = wall;
        std::ofstream out(cfg.report_path, std::ios::binary);
        if (!out) throw ValidationError("cannot open report '" + cfg.report_path + "'");
        out << rep.dump(2) << '\n';
        return 0;
    } catch (const NonFiniteState& e) {
        err << "runtime error: " << e.what() << '\n';
        return 3;
    } catch (const NonFiniteEvaluation& e) {
        err << "runtime error: " << e.what() << '\n';
        return 3;
    } catch (const GrazingIncidence& e) {
        err << "runtime error: " << e.what() << '\n';
        return 3;
    } catch (const Error& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    }
}

/// Text listing of every system: parameters, state layout, invariants.
inline std::string list_systems() {
    std::ostringstream os;
    for (const auto& s : system_registry()) {
        os << s.name << '\n';
        os << "  parameters: " << s.parameters_doc << '\n';
        os << "  state: " << s.state_doc << '\n';
        os << "  invariants: ";
        for (std::size_t i = 0; i < s.invariant_names.size(); ++i) {
            if (i) os << ", ";
            os << s.invariant_names[i];
        }
        os << '\n';
    }
    return os.str();
}

} // namespace gmech
