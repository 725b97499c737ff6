#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "vortex/dynamics.hpp"

using namespace vortex;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("lia rhs on the unit circle") {
    auto d1 = [](double xi) { return Vec3{-std::sin(xi), std::cos(xi), 0.0}; };
    auto d2 = [](double xi) { return Vec3{-std::cos(xi), -std::sin(xi), 0.0}; };
    auto d3 = [](double xi) { return Vec3{std::sin(xi), -std::cos(xi), 0.0}; };

    SECTION("pure binormal advection: alpha = 1, omega = 0") {
        for (double xi : {0.0, 1.0, 2.5, 4.8}) {
            const Vec3 rhs = lia_rhs(d1(xi), d2(xi), d3(xi), 1.0, 0.0);
            CHECK_THAT(rhs.x, WithinAbs(0.0, 1e-15));
            CHECK_THAT(rhs.y, WithinAbs(0.0, 1e-15));
            CHECK_THAT(rhs.z, WithinAbs(1.0, 1e-15));
        }
    }
    SECTION("pure core flow: alpha = 0, omega = 1 gives (-sin, cos, 0)") {
        // symbolic check: 2 r''' + 3 |r''|^2 r' = 2(sin,-cos,0) + 3(-sin,cos,0)
        for (double xi : {0.0, 0.9, 3.1, 5.7}) {
            const Vec3 rhs = lia_rhs(d1(xi), d2(xi), d3(xi), 0.0, 1.0);
            CHECK_THAT(rhs.x, WithinAbs(-std::sin(xi), 1e-15));
            CHECK_THAT(rhs.y, WithinAbs(std::cos(xi), 1e-15));
            CHECK_THAT(rhs.z, WithinAbs(0.0, 1e-15));
        }
    }
    SECTION("linearity in alpha") {
        const double xi = 1.23;
        const Vec3 full = lia_rhs(d1(xi), d2(xi), d3(xi), 0.7 + 0.4, 2.0);
        const Vec3 split = lia_rhs(d1(xi), d2(xi), d3(xi), 0.7, 0.0) +
                           lia_rhs(d1(xi), d2(xi), d3(xi), 0.4, 2.0);
        CHECK_THAT(norm(full - split), WithinAbs(0.0, 1e-14));
    }
}

TEST_CASE("rotating-translating circle solves the evolution equation") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> par(-3.0, 3.0);
    for (int trial = 0; trial < 5; ++trial) {
        const double alpha = par(rng), omega = par(rng), phi0 = par(rng);
        const double res = exact_solution_residual(alpha, omega, phi0,
                                                   {par(rng), par(rng), par(rng)}, 64, 64);
        CHECK(res <= 1e-12);
    }
    CHECK(exact_solution_residual(0.0, 0.0, 0.3, {0, 0, 0}, 64, 64) == 0.0);
    CHECK(exact_solution_residual(1.0, 1e3, 0.0, {0, 0, 0}, 64, 64) <= 1e-10);
}

TEST_CASE("ring momentum and the circulation constraint") {
    const PhysicalConstants unit = unit_constants();

    RingConfiguration rc;
    rc.radius = 1.0;
    rc.gamma = 0.0;
    CHECK(norm(momentum_from_ring(rc, unit)) == 0.0);

    rc.gamma = 0.8;
    rc.radius = unit.Rf; // chi = varpi = 0
    const Vec3 p = momentum_from_ring(rc, unit);
    CHECK_THAT(norm2(p), WithinRel(std::pow(M_PI * unit.rho0 * unit.Rf * unit.Rf * rc.gamma, 2),
                                   1e-15));
    CHECK(constraint_residual(rc, unit) < 1e-14);

    std::mt19937 rng(11);
    std::uniform_real_distribution<double> rad(1.0, 20.0), gam(-3.0, 3.0), ang(0.0, 6.28);
    for (int i = 0; i < 1000; ++i) {
        RingConfiguration r;
        r.radius = rad(rng);
        r.gamma = gam(rng);
        r.phase = ang(rng);
        const double th = ang(rng), ph = ang(rng);
        r.b_hat = {std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
        r.center = {gam(rng), gam(rng), gam(rng)};
        CHECK(constraint_residual(r, unit) < 1e-14);
    }

    RingConfiguration bad;
    bad.radius = 0.5; // below Rf
    CHECK_THROWS_AS(bad.validate(unit), ValidationError);
}

TEST_CASE("conditional-time flow: identity, full period, conserved quantities") {
    const PhysicalConstants unit = unit_constants();
    const DerivedScales d = derive_scales(unit);

    RingConfiguration rc;
    rc.radius = 2.0;
    rc.gamma = 1.1;
    rc.phase = 0.4;
    rc.center = {1.0, 0.0, -1.0};
    const Vec3 p = momentum_from_ring(rc, unit);

    SECTION("t# = 0 is the identity") {
        const RingConfiguration out = conditional_time_flow(rc, p, 0.0, unit);
        CHECK(out.phase == rc.phase);
        CHECK(norm(out.center - rc.center) == 0.0);
        CHECK(out.radius == rc.radius);
        CHECK(out.gamma == rc.gamma);
    }

    SECTION("full oscillator period returns (chi, varpi), translates the center") {
        const double period = 2.0 * M_PI * d.t0 / unit.omega;
        const RingConfiguration out = conditional_time_flow(rc, p, period, unit);
        CHECK_THAT(out.chi(unit), WithinAbs(rc.chi(unit), 1e-12));
        CHECK_THAT(out.varpi(unit), WithinAbs(rc.varpi(unit), 1e-12));
        const Vec3 expected = rc.center - (period / unit.mu0) * p;
        CHECK_THAT(norm(out.center - expected), WithinAbs(0.0, 1e-14));
    }

    SECTION("chi^2 + varpi^2 and the Hamiltonian are conserved") {
        const double r2 = rc.chi(unit) * rc.chi(unit) + rc.varpi(unit) * rc.varpi(unit);
        const double h0 = ring_hamiltonian(rc, unit);
        for (double t : {0.3, 1.7, 12.0, 250.0}) {
            const RingConfiguration out = conditional_time_flow(rc, p, t, unit);
            const double r2t = out.chi(unit) * out.chi(unit) + out.varpi(unit) * out.varpi(unit);
            CHECK_THAT(r2t, WithinRel(r2, 1e-13));
            CHECK_THAT(ring_hamiltonian(out, unit), WithinRel(h0, 1e-13));
            CHECK(out.radius == rc.radius);
            CHECK(out.gamma == rc.gamma);
        }
    }
}

TEST_CASE("closed-form flow is the limit of symplectic Euler steps") {
    // bracket {p,q} = delta, {varpi,chi} = 1/(E0 t0) applied to
    // H = p^2/(2 mu0) + (E0 omega/2)(varpi^2 + chi^2) gives
    // dchi/dt# = -(omega/t0) varpi, dvarpi/dt# = +(omega/t0) chi,
    // dq/dt# = -p/mu0; the flow must be the h -> 0 limit at order 1
    PhysicalConstants c = unit_constants();
    c.omega = 1.7;
    const DerivedScales d = derive_scales(c);

    RingConfiguration rc;
    rc.radius = 3.0;
    rc.gamma = 0.9;
    rc.phase = 0.25;
    const Vec3 p = momentum_from_ring(rc, c);
    const double t_final = 0.8;
    const RingConfiguration exact = conditional_time_flow(rc, p, t_final, c);

    auto euler_error = [&](int steps) {
        const double h = t_final / steps;
        double chi = rc.chi(c), varpi = rc.varpi(c);
        Vec3 q = rc.center;
        const double w = c.omega / d.t0;
        for (int i = 0; i < steps; ++i) {
            chi = chi - h * w * varpi;
            varpi = varpi + h * w * chi; // semi-implicit update
            q -= (h / c.mu0) * p;
        }
        const double dchi = chi - exact.chi(c);
        const double dvarpi = varpi - exact.varpi(c);
        return std::sqrt(dchi * dchi + dvarpi * dvarpi) + norm(q - exact.center);
    };

    const double e1 = euler_error(200);
    const double e2 = euler_error(400);
    const double e3 = euler_error(800);
    CHECK(e1 / e2 > 1.7);
    CHECK(e1 / e2 < 2.3);
    CHECK(e2 / e3 > 1.7);
    CHECK(e2 / e3 < 2.3);
}

TEST_CASE("dimensionless parameter conversions") {
    const double gamma = 2.2, radius = 1.3;
    for (double t : {0.0, 0.7, 5.0}) {
        const double tau = tau_from_time(t, gamma, radius);
        CHECK_THAT(time_from_tau(tau, gamma, radius), WithinAbs(t, 1e-13));
    }
    CHECK_THAT(tau_from_time(4.0 * M_PI * radius * radius / gamma, gamma, radius),
               WithinRel(1.0, 1e-14));
    CHECK_THAT(xi_from_arclength(arclength_from_xi(2.0, radius), radius),
               WithinRel(2.0, 1e-15));
}
