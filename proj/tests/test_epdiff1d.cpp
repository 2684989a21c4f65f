#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "gmech/algebra.hpp"
#include "gmech/epdiff1d.hpp"
#include "gmech/integrate.hpp"
#include "test_util.hpp"

using namespace gmech;

namespace {

std::vector<double> pulson_state(const PulsonEnsemble& e) {
    std::vector<double> s(e.q);
    s.insert(s.end(), e.p.begin(), e.p.end());
    return s;
}

} // namespace

TEST_CASE("interaction kernels are even with a flat origin", "[epdiff1d]") {
    const GreensFunction peak = GreensFunction::peakon(1.0);
    CHECK(peak.eval(0.0) == 1.0);
    CHECK(peak.eval(2.0) == Catch::Approx(std::exp(-2.0)).margin(1e-15));
    CHECK(peak.eval(-2.0) == peak.eval(2.0));
    CHECK(peak.deriv(0.0) == 0.0);
    CHECK(peak.deriv(1.0) == Catch::Approx(-std::exp(-1.0)).margin(1e-15));
    CHECK(peak.deriv(-1.0) == Catch::Approx(std::exp(-1.0)).margin(1e-15));

    const GreensFunction gauss = GreensFunction::gaussian(2.0);
    CHECK(gauss.eval(0.0) == 1.0);
    CHECK(gauss.deriv(0.0) == 0.0);
    CHECK(gauss.deriv(1.0) == Catch::Approx(-0.25 * std::exp(-0.125)).margin(1e-15));

    const GreensFunction comp = GreensFunction::compacton();
    CHECK(comp.eval(0.5) == 0.5);
    CHECK(comp.eval(1.5) == 0.0);
    CHECK(comp.deriv(1.5) == 0.0);

    CHECK_THROWS_AS(GreensFunction::peakon(0.0), ValidationError);
    CHECK_THROWS_AS(GreensFunction::gaussian(-1.0), ValidationError);
    CHECK_THROWS_AS(PulsonEnsemble({0.0}, {1.0, 2.0}), ValidationError);
    CHECK_THROWS_AS(PulsonEnsemble({}, {}), ValidationError);
}

TEST_CASE("two-pulson Hamiltonian reference value", "[epdiff1d]") {
    const GreensFunction G = GreensFunction::peakon(1.0);
    const PulsonEnsemble e({-5.0, 0.0}, {2.0, 1.0});
    CHECK(pulson_hamiltonian(G, e) ==
          Catch::Approx(2.5 + 2.0 * std::exp(-5.0)).epsilon(1e-14));
    CHECK(velocity_field(G, e, 0.0) ==
          Catch::Approx(1.0 + 2.0 * std::exp(-5.0)).epsilon(1e-14));
}

TEST_CASE("pulson equations are canonical for H_N", "[epdiff1d]") {
    const GreensFunction G = GreensFunction::gaussian(1.5); // smooth kernel for FD
    std::mt19937 gen(501);
    for (int trial = 0; trial < 10; ++trial) {
        const PulsonEnsemble e({testutil::uniform(gen, -4.0, -1.0),
                                testutil::uniform(gen, 1.0, 4.0),
                                testutil::uniform(gen, 5.0, 8.0)},
                               {testutil::uniform(gen, -2.0, 2.0),
                                testutil::uniform(gen, -2.0, 2.0),
                                testutil::uniform(gen, -2.0, 2.0)});
        const auto [qd, pd] = pulson_rhs(G, e);
        const auto h_of = [&G](const std::vector<double>& s) {
            return pulson_hamiltonian(
                G, PulsonEnsemble({s[0], s[1], s[2]}, {s[3], s[4], s[5]}));
        };
        const auto grad = fd_gradient(h_of, pulson_state(e));
        for (int i = 0; i < 3; ++i) {
            CHECK(qd[static_cast<std::size_t>(i)] ==
                  Catch::Approx(grad[static_cast<std::size_t>(i + 3)]).margin(1e-7));
            CHECK(pd[static_cast<std::size_t>(i)] ==
                  Catch::Approx(-grad[static_cast<std::size_t>(i)]).margin(1e-7));
        }
    }
}

TEST_CASE("a single pulson travels rigidly at speed p G(0)", "[epdiff1d]") {
    const GreensFunction G = GreensFunction::peakon(1.0);
    const Trajectory traj =
        integrate(pulson_system(G, 1), {-3.0, 0.8}, {1e-3, 5.0, 100});
    for (std::size_t r = 0; r < traj.times.size(); ++r) {
        CHECK(traj.states[r][0] ==
              Catch::Approx(-3.0 + 0.8 * traj.times[r]).margin(1e-10));
        CHECK(traj.states[r][1] == 0.8); // momentum untouched bitwise
    }
}

TEST_CASE("rear-end pulson collision exchanges the momenta", "[epdiff1d]") {
    const GreensFunction G = GreensFunction::peakon(1.0);
    const PulsonEnsemble e0({-10.0, 0.0}, {2.0, 1.0});
    const CollisionSummary cs = pulson_collide(G, e0, {1e-3, 30.0, 1});

    CHECK_FALSE(cs.halted);
    CHECK(cs.end_time == Catch::Approx(30.0));
    CHECK(cs.min_separation > 1e-2); // overtaking pulsons never cross
    CHECK(cs.h_drift_rel <= 1e-8);
    CHECK(cs.momentum_drift_abs <= 1e-12);
    // asymptotically the faster momentum hops to the front particle
    CHECK(cs.p_out[0] == Catch::Approx(1.0).margin(1e-4));
    CHECK(cs.p_out[1] == Catch::Approx(2.0).margin(1e-4));
}

TEST_CASE("head-on antisymmetric collision halts at vanishing separation", "[epdiff1d]") {
    const GreensFunction G = GreensFunction::peakon(1.0);
    const PulsonEnsemble e0({-3.0, 3.0}, {1.0, -1.0});
    const CollisionSummary cs = pulson_collide(G, e0, {2e-5, 5.0, 1});

    CHECK(cs.halted);
    CHECK(cs.halt_time > 0.0);
    CHECK(cs.halt_time < 5.0);
    CHECK(cs.min_separation < 1e-6);
    // the antisymmetry q1 = -q2, p1 = -p2 is exact in floating point
    CHECK(cs.momentum_drift_abs == 0.0);
    CHECK(cs.p_out[0] == -cs.p_out[1]);
    CHECK(cs.p_out[0] > 10.0); // the momenta blow up as the pair merges
}

TEST_CASE("pulson flow conserves H_N and total momentum", "[epdiff1d]") {
    const GreensFunction G = GreensFunction::peakon(1.0);
    const Trajectory traj =
        integrate(pulson_system(G, 2), {-5.0, 0.0, 2.0, 1.0}, {1e-3, 25.0, 25});
    const DriftReport rep = invariant_drift(
        traj, {{"hamiltonian",
                [G](const std::vector<double>& s) {
                    return pulson_hamiltonian(G, PulsonEnsemble({s[0], s[1]}, {s[2], s[3]}));
                }},
               {"total_momentum",
                [](const std::vector<double>& s) { return s[2] + s[3]; }}});
    CHECK(rep.invariants[0].max_rel_drift <= 1e-8);
    CHECK(rep.invariants[1].max_abs_drift <= 1e-12);
}

TEST_CASE("periodic grid accessors and validation", "[epdiff1d]") {
    const PeriodicGrid1D grid(16.0, 64);
    CHECK(grid.dx() == 0.25);
    CHECK(grid.x(0) == -8.0);
    CHECK(grid.x(32) == 0.0);
    CHECK(grid.wavenumber(0) == 0.0);
    CHECK(grid.wavenumber(1) == Catch::Approx(2.0 * std::numbers::pi / 16.0));
    CHECK(grid.wavenumber(63) == Catch::Approx(-2.0 * std::numbers::pi / 16.0));
    CHECK(grid.periodic_distance(-7.9, 7.9) == Catch::Approx(0.2).margin(1e-12));

    CHECK_THROWS_AS(PeriodicGrid1D(16.0, 100), ValidationError);
    CHECK_THROWS_AS(PeriodicGrid1D(16.0, 8), ValidationError);
    CHECK_THROWS_AS(PeriodicGrid1D(0.0, 64), ValidationError);
}

TEST_CASE("Helmholtz operators invert each other and act diagonally on modes",
          "[epdiff1d]") {
    const PeriodicGrid1D grid(20.0, 128);
    const double alpha = 1.3;

    std::mt19937 gen(502);
    std::vector<double> u(128);
    for (int i = 0; i < 128; ++i) {
        const double x = grid.x(i);
        u[static_cast<std::size_t>(i)] =
            std::exp(-x * x / 4.0) + 0.3 * std::sin(2.0 * std::numbers::pi * x / 20.0);
    }
    const auto m = helmholtz_apply(grid, u, alpha);
    const auto back = helmholtz_invert(grid, m, alpha);
    double worst = 0.0;
    for (int i = 0; i < 128; ++i)
        worst = std::max(worst, std::fabs(back[static_cast<std::size_t>(i)] -
                                          u[static_cast<std::size_t>(i)]));
    CHECK(worst <= 1e-12);

    // a pure Fourier mode is an eigenfunction with eigenvalue 1 + alpha^2 k^2
    const double k = grid.wavenumber(3);
    std::vector<double> mode(128), expect(128);
    for (int i = 0; i < 128; ++i) {
        mode[static_cast<std::size_t>(i)] = std::cos(k * grid.x(i));
        expect[static_cast<std::size_t>(i)] =
            (1.0 + alpha * alpha * k * k) * mode[static_cast<std::size_t>(i)];
    }
    const auto applied = helmholtz_apply(grid, mode, alpha);
    worst = 0.0;
    for (int i = 0; i < 128; ++i)
        worst = std::max(worst, std::fabs(applied[static_cast<std::size_t>(i)] -
                                          expect[static_cast<std::size_t>(i)]));
    CHECK(worst <= 1e-12);

    CHECK_THROWS_AS(helmholtz_apply(grid, std::vector<double>(64, 0.0), alpha),
                    DimensionMismatch);
    CHECK_THROWS_AS(helmholtz_invert(grid, std::vector<double>(64, 0.0), alpha),
                    DimensionMismatch);
}

TEST_CASE("local_maxima ranks peaks tallest first", "[epdiff1d]") {
    const PeriodicGrid1D grid(16.0, 64);
    std::vector<double> u(64);
    for (int i = 0; i < 64; ++i) {
        const double x = grid.x(i);
        u[static_cast<std::size_t>(i)] = 2.0 * std::exp(-(x + 4.0) * (x + 4.0)) +
                                         std::exp(-(x - 4.0) * (x - 4.0));
    }
    const auto peaks = local_maxima(grid, u);
    REQUIRE(peaks.size() == 2);
    CHECK(std::fabs(peaks[0].first - (-4.0)) <= grid.dx());
    CHECK(peaks[0].second == Catch::Approx(2.0).margin(0.05));
    CHECK(std::fabs(peaks[1].first - 4.0) <= grid.dx());
    CHECK(peaks[1].second == Catch::Approx(1.0).margin(0.05));
}

TEST_CASE("assess_resolution flags top-band energy", "[epdiff1d]") {
    const PeriodicGrid1D grid(16.0, 64);
    std::vector<double> smooth(64), jagged(64);
    for (int i = 0; i < 64; ++i) {
        smooth[static_cast<std::size_t>(i)] =
            std::sin(2.0 * std::numbers::pi * grid.x(i) / 16.0);
        jagged[static_cast<std::size_t>(i)] = (i % 2 == 0) ? 1.0 : -1.0;
    }
    const auto ok = assess_resolution(grid, smooth);
    CHECK(ok.top_band_energy_fraction <= 1e-12);
    CHECK_FALSE(ok.loss);
    const auto bad = assess_resolution(grid, jagged);
    CHECK(bad.top_band_energy_fraction >= 0.99);
    CHECK(bad.loss);
}

TEST_CASE("PDE flow conserves the momentum integral and H^1 energy", "[epdiff1d]") {
    const PeriodicGrid1D grid(40.0, 256);
    const ChParams prm{1.0, 0.0, 0.0};
    std::vector<double> m0(256);
    for (int i = 0; i < 256; ++i) {
        const double x = grid.x(i);
        m0[static_cast<std::size_t>(i)] =
            std::exp(-(x + 5.0) * (x + 5.0) / 2.0) + 0.5 * std::exp(-x * x / 3.0);
    }
    const Trajectory traj = integrate(epdiff_pde_system(grid, prm), m0, {2e-3, 2.0, 100});
    const DriftReport rep = invariant_drift(
        traj, {{"momentum_integral",
                [grid](const std::vector<double>& m) { return momentum_integral(grid, m); }},
               {"h1_energy", [grid, prm](const std::vector<double>& m) {
                    return h1_energy(grid, m, prm.alpha);
                }}});
    CHECK(rep.invariants[0].max_abs_drift <= 1e-10);
    CHECK(rep.invariants[1].max_rel_drift <= 1e-8);
}

TEST_CASE("small-amplitude waves obey the dispersive phase velocity", "[epdiff1d]") {
    const PeriodicGrid1D grid(8.0 * std::numbers::pi, 256);
    const ChParams prm{1.0, 1.0, 0.1};
    const double k = grid.wavenumber(3); // 0.75
    REQUIRE(k == Catch::Approx(0.75));
    const double c = (prm.c0 - prm.gamma * k * k) / (1.0 + prm.alpha * prm.alpha * k * k);

    const double amp = 1e-6;
    std::vector<double> m0(256);
    for (int i = 0; i < 256; ++i)
        m0[static_cast<std::size_t>(i)] = amp * std::cos(k * grid.x(i));

    const double t_end = 1.0;
    const Trajectory traj = integrate(epdiff_pde_system(grid, prm), m0, {1e-3, t_end, 1000});
    const auto& mf = traj.states.back();

    double worst = 0.0;
    for (int i = 0; i < 256; ++i)
        worst = std::max(worst, std::fabs(mf[static_cast<std::size_t>(i)] -
                                          amp * std::cos(k * (grid.x(i) - c * t_end))));
    CHECK(worst <= 1e-10);

    // linear terms carry no net momentum either
    CHECK(std::fabs(momentum_integral(grid, mf) - momentum_integral(grid, m0)) <= 1e-12);
}

TEST_CASE("single-peakon PDE run tracks the particle solution", "[epdiff1d]") {
    const GreensFunction G = GreensFunction::peakon(1.0);
    const PeriodicGrid1D grid(40.0, 512);
    const ParticlePdeReport rep =
        particle_vs_pde(G, PulsonEnsemble({-10.0}, {1.0}), grid, {2e-3, 2.0, 10});

    REQUIRE(!rep.times.empty());
    REQUIRE(rep.peak_error.size() == rep.times.size());
    CHECK(rep.peak_error.front() <= grid.dx());
    for (double pe : rep.peak_error) CHECK(pe <= 2.5 * grid.dx());
    for (double l2 : rep.l2_u_error) CHECK(l2 <= 0.1);

    CHECK_THROWS_AS(particle_vs_pde(GreensFunction::gaussian(1.0),
                                    PulsonEnsemble({0.0}, {1.0}), grid, {2e-3, 1.0, 10}),
                    ValidationError);
}

TEST_CASE("two-peakon PDE run reproduces the momentum exchange", "[epdiff1d]") {
    const GreensFunction G = GreensFunction::peakon(1.0);
    const PeriodicGrid1D grid(40.0, 256);
    const ParticlePdeReport rep =
        particle_vs_pde(G, PulsonEnsemble({-6.0, -1.0}, {2.0, 1.0}), grid, {2e-3, 8.0, 10});

    REQUIRE(rep.particle_separation.size() == rep.times.size());
    CHECK(rep.particle_exchange_time > 0.0);
    CHECK(rep.pde_exchange_time > 0.0);
    CHECK(std::fabs(rep.particle_exchange_time - rep.pde_exchange_time) <= 0.5);
    for (double s : rep.particle_separation) CHECK(s > 0.0);
    for (std::size_t r = 0; r < rep.times.size(); ++r)
        CHECK(rep.l2_u_error[r] <= 1.2);
}
