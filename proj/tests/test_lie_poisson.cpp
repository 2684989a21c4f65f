#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "gmech/lie_poisson.hpp"
#include "gmech/ray_optics.hpp"
#include "gmech/rigid_body.hpp"
#include "test_util.hpp"

using namespace gmech;
using testutil::random_vec3;

namespace {

R3PoissonSystem rigid_body_system(const Inertia3& I) {
    R3PoissonSystem sys;
    sys.casimir = [](const Vec3& x) { return 0.5 * norm_sq(x); };
    sys.hamiltonian = [I](const Vec3& x) { return euler_energy(I, x); };
    sys.grad_casimir = [](const Vec3& x) { return x; };
    sys.grad_hamiltonian = [I](const Vec3& x) { return euler_omega(I, x); };
    return sys;
}

} // namespace

TEST_CASE("r3_rhs vanishes for aligned gradients", "[lie_poisson]") {
    R3PoissonSystem sys;
    sys.casimir = [](const Vec3& x) { return 0.5 * norm_sq(x); };
    sys.hamiltonian = [](const Vec3& x) { return norm_sq(x); };
    CHECK(max_abs_diff(r3_rhs(sys, {0.7, -0.2, 1.1}), Vec3{}) <= 1e-9);
}

TEST_CASE("r3_rhs reproduces the rigid-body equations", "[lie_poisson]") {
    const Inertia3 I(1.0, 2.0, 3.0);
    const R3PoissonSystem sys = rigid_body_system(I);
    std::mt19937 gen(201);
    for (int trial = 0; trial < 100; ++trial) {
        const Vec3 pi = random_vec3(gen, 2.0);
        CHECK(max_abs_diff(r3_rhs(sys, pi), euler_rhs(I, pi)) <= 1e-12);
    }
}

TEST_CASE("r3_rhs with FD gradients stays close to analytic", "[lie_poisson]") {
    const Inertia3 I(1.0, 2.0, 3.0);
    R3PoissonSystem fd = rigid_body_system(I);
    fd.grad_casimir = nullptr;
    fd.grad_hamiltonian = nullptr;
    std::mt19937 gen(202);
    for (int trial = 0; trial < 20; ++trial) {
        const Vec3 pi = random_vec3(gen, 2.0);
        CHECK(max_abs_diff(r3_rhs(fd, pi), euler_rhs(I, pi)) <= 1e-8);
    }
}

TEST_CASE("r3_rhs matches the reduced ray-optics flow", "[lie_poisson]") {
    const MediumProfile medium = MediumProfile::fiber(0.9, 1.0, 0.1);
    const R3PoissonSystem sys = reduced_ray_system(medium);
    std::mt19937 gen(203);
    for (int trial = 0; trial < 50; ++trial) {
        const double x = testutil::uniform(gen, 0.0, 1.0);
        const double y = testutil::uniform(gen, 0.0, 0.3);
        const double z = testutil::uniform(gen, -0.4, 0.4);
        const ReducedRayState r{x, y, z};
        const Vec3 got = r3_rhs(sys, {r.X, r.Y, r.Z});
        const Vec3 want = reduced_rhs(medium, r);
        CHECK(max_abs_diff(got, want) <= 1e-12);
    }
}

TEST_CASE("bracket_eval antisymmetry and the Casimir property", "[lie_poisson]") {
    const Inertia3 I(1.0, 2.0, 3.0);
    const R3PoissonSystem sys = rigid_body_system(I);

    const auto f = [](const Vec3& x) { return x.x * x.y + std::sin(x.z); };
    const auto g = [](const Vec3& x) { return x.z * x.z - 0.3 * x.x; };

    std::mt19937 gen(204);
    for (int trial = 0; trial < 20; ++trial) {
        const Vec3 x = random_vec3(gen, 1.5);
        CHECK(std::fabs(bracket_eval(f, f, sys, x)) <= 1e-9);
        CHECK(std::fabs(bracket_eval(f, g, sys, x) + bracket_eval(g, f, sys, x)) <= 1e-9);
        CHECK(std::fabs(bracket_eval(sys.casimir, g, sys, x)) <= 1e-6);
    }
}

TEST_CASE("bracket_eval hand value for rigid-body coordinates", "[lie_poisson]") {
    const Inertia3 I(1.0, 2.0, 3.0);
    const R3PoissonSystem sys = rigid_body_system(I);
    const auto pi1 = [](const Vec3& x) { return x.x; };
    const auto pi2 = [](const Vec3& x) { return x.y; };
    // {Pi1, Pi2} = -grad C . (e1 x e2) = -Pi3 = -3 at Pi=(1,2,3)
    CHECK(bracket_eval(pi1, pi2, sys, {1.0, 2.0, 3.0}) == Catch::Approx(-3.0).margin(1e-6));
}

TEST_CASE("bracket_eval satisfies Leibniz numerically", "[lie_poisson]") {
    const Inertia3 I(1.0, 2.0, 3.0);
    const R3PoissonSystem sys = rigid_body_system(I);
    const auto f = [](const Vec3& x) { return x.x + 0.2 * x.z; };
    const auto g = [](const Vec3& x) { return x.y - 0.1 * x.x; };
    const auto h = [](const Vec3& x) { return x.z + x.x * x.y; };
    const auto fg = [&](const Vec3& x) { return f(x) * g(x); };

    std::mt19937 gen(205);
    for (int trial = 0; trial < 20; ++trial) {
        const Vec3 x = random_vec3(gen, 1.2);
        const double lhs = bracket_eval(fg, h, sys, x);
        const double rhs =
            f(x) * bracket_eval(g, h, sys, x) + bracket_eval(f, h, sys, x) * g(x);
        CHECK(std::fabs(lhs - rhs) <= 1e-6);
    }
}

TEST_CASE("r3 flows are divergence-free", "[lie_poisson]") {
    const Inertia3 I(1.0, 2.0, 3.0);
    const R3PoissonSystem sys = rigid_body_system(I);
    std::mt19937 gen(206);
    const double h = 1e-5;
    for (int trial = 0; trial < 20; ++trial) {
        const Vec3 x = random_vec3(gen, 1.5);
        double div = 0.0;
        for (int i = 0; i < 3; ++i) {
            Vec3 xp = x, xm = x;
            xp[i] += h;
            xm[i] -= h;
            div += (r3_rhs(sys, xp)[i] - r3_rhs(sys, xm)[i]) / (2.0 * h);
        }
        CHECK(std::fabs(div) <= 1e-6);
    }
}

TEST_CASE("check_casimir reports conservation along trajectories", "[lie_poisson]") {
    const Inertia3 I(1.0, 2.0, 3.0);
    const R3PoissonSystem sys = rigid_body_system(I);
    const Trajectory traj = integrate(r3_system(sys), {1.0, 0.01, 0.0}, {1e-3, 10.0, 10});

    const DriftReport rep = check_casimir(sys, traj);
    REQUIRE(rep.invariants.size() == 1);
    CHECK(rep.invariants[0].max_rel_drift <= 1e-8);

    // H conserved to the same bound
    const DriftReport hrep = invariant_drift(
        traj, {{"hamiltonian", [&sys](const std::vector<double>& s) {
                    return sys.hamiltonian({s[0], s[1], s[2]});
                }}});
    CHECK(hrep.invariants[0].max_rel_drift <= 1e-8);

    R3PoissonSystem flat = sys;
    flat.casimir = [](const Vec3&) { return 2.0; };
    const DriftReport crep = check_casimir(flat, traj);
    CHECK(crep.invariants[0].max_abs_drift == 0.0);
}

TEST_CASE("ray-optics Casimir is conserved along the reduced flow", "[lie_poisson]") {
    const MediumProfile medium = MediumProfile::fiber(0.9, 1.0, 0.1);
    const R3PoissonSystem sys = reduced_ray_system(medium);
    const Trajectory traj =
        integrate(r3_system(sys), {0.25, 0.0425, 0.025}, {1e-3, 10.0, 10});
    const DriftReport rep = check_casimir(sys, traj);
    CHECK(rep.invariants[0].max_rel_drift <= 1e-8);
}
