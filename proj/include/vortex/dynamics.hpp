#pragma once

#include <cmath>

#include "vortex/constants.hpp"
#include "vortex/errors.hpp"
#include "vortex/vec3.hpp"

namespace vortex {

// Dimensionless evolution variables of a circular ring: tau = t Gamma/(4 pi R^2)
// and xi = s/R, exposed so CLI users can work in physical time.

inline double tau_from_time(double t, double gamma, double radius) {
    return t * gamma / (4.0 * M_PI * radius * radius);
}
inline double time_from_tau(double tau, double gamma, double radius) {
    return tau * 4.0 * M_PI * radius * radius / gamma;
}
inline double xi_from_arclength(double s, double radius) { return s / radius; }
inline double arclength_from_xi(double xi, double radius) { return xi * radius; }

/// Right-hand side of the perturbed local-induction equation for the
/// projective curve, alpha (r' x r'') + omega (2 r''' + 3 |r''|^2 r'),
/// with derivatives taken in the angle xi.
inline Vec3 lia_rhs(const Vec3& d1, const Vec3& d2, const Vec3& d3, double alpha,
                    double omega) {
    return alpha * cross(d1, d2) + omega * (2.0 * d3 + 3.0 * norm2(d2) * d1);
}

/// Max residual of the rotating-translating circle solution
///   r(tau, xi) = (qx/R + cos(xi+phi), qy/R + sin(xi+phi), qz/R + alpha tau),
///   phi = phi0 + omega tau,
/// substituted into the evolution equation with all derivatives closed-form.
inline double exact_solution_residual(double alpha, double omega, double phi0,
                                      const Vec3& /*q*/, int n_tau, int n_xi,
                                      double tau_max = 1.0) {
    // q/R only shifts the solution by a constant; it drops out of every
    // derivative, so the residual does not depend on it.
    double worst = 0.0;
    for (int it = 0; it < n_tau; ++it) {
        const double tau = tau_max * it / std::max(1, n_tau - 1);
        const double phi = phi0 + omega * tau;
        for (int ix = 0; ix < n_xi; ++ix) {
            const double xi = 2.0 * M_PI * ix / n_xi;
            const double cs = std::cos(xi + phi), sn = std::sin(xi + phi);
            const Vec3 dtau{-sn * omega, cs * omega, alpha};
            const Vec3 d1{-sn, cs, 0.0};
            const Vec3 d2{-cs, -sn, 0.0};
            const Vec3 d3{sn, -cs, 0.0};
            const Vec3 rhs = lia_rhs(d1, d2, d3, alpha, omega);
            const Vec3 res = dtau - rhs;
            worst = std::max({worst, std::abs(res.x), std::abs(res.y), std::abs(res.z)});
        }
    }
    return worst;
}

/// Classical circular ring in the oscillator variables. DeltaR = sqrt(R^2-Rf^2)
/// and (chi, varpi) = (DeltaR/Rf)(cos phi, sin phi) satisfy
/// chi^2 + varpi^2 = (R^2 - Rf^2)/Rf^2 identically.
struct RingConfiguration {
    double radius = 1.0;   ///< R >= Rf
    Vec3 center;           ///< q
    Vec3 b_hat{0, 0, 1};   ///< unit binormal
    double phase = 0.0;    ///< phi0 [rad]
    double gamma = 0.0;    ///< circulation [m^2/s]

    void validate(const PhysicalConstants& c) const {
        if (!(radius >= c.Rf))
            throw ValidationError("RingConfiguration: radius must be >= Rf");
        if (std::abs(norm(b_hat) - 1.0) > 1e-9)
            throw ValidationError("RingConfiguration: b_hat must be a unit vector");
    }

    double delta_r(const PhysicalConstants& c) const {
        return std::sqrt(radius * radius - c.Rf * c.Rf);
    }
    double chi(const PhysicalConstants& c) const {
        return delta_r(c) / c.Rf * std::cos(phase);
    }
    double varpi(const PhysicalConstants& c) const {
        return delta_r(c) / c.Rf * std::sin(phase);
    }
};

/// Canonical momentum of the ring, p = pi rho0 R^2 Gamma b.
inline Vec3 momentum_from_ring(const RingConfiguration& rc, const PhysicalConstants& c) {
    rc.validate(c);
    return (M_PI * c.rho0 * rc.radius * rc.radius * rc.gamma) * rc.b_hat;
}

/// Relative residual of the constraint
///   p^2 = pi^2 rho0^2 Rf^4 (1 + varpi^2 + chi^2)^2 Gamma^2,
/// an algebraic identity given the (chi, varpi) definitions.
inline double constraint_residual(const RingConfiguration& rc, const PhysicalConstants& c) {
    const Vec3 p = momentum_from_ring(rc, c);
    const double lhs = norm2(p);
    const double one_plus = 1.0 + rc.varpi(c) * rc.varpi(c) + rc.chi(c) * rc.chi(c);
    const double rf2 = c.Rf * c.Rf;
    const double rhs =
        M_PI * M_PI * c.rho0 * c.rho0 * rf2 * rf2 * one_plus * one_plus * rc.gamma * rc.gamma;
    const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
    return std::abs(lhs - rhs) / scale;
}

/// Oscillator + free-particle energy H = p^2/(2 mu0) + (E0 omega/2)(varpi^2 + chi^2).
inline double ring_hamiltonian(const RingConfiguration& rc, const PhysicalConstants& c) {
    const DerivedScales d = derive_scales(c);
    const Vec3 p = momentum_from_ring(rc, c);
    const double osc = rc.varpi(c) * rc.varpi(c) + rc.chi(c) * rc.chi(c);
    return norm2(p) / (2.0 * c.mu0) + 0.5 * d.E0 * c.omega * osc;
}

/// Closed-form conditional-time flow generated by the ring Hamiltonian:
/// phi -> phi + (omega/t0) t#, q -> q - (t#/mu0) p; R and Gamma invariant,
/// (chi, varpi) rotate rigidly.
inline RingConfiguration conditional_time_flow(const RingConfiguration& rc, const Vec3& p,
                                               double t_sharp, const PhysicalConstants& c) {
    const DerivedScales d = derive_scales(c);
    RingConfiguration out = rc;
    out.phase = rc.phase + c.omega / d.t0 * t_sharp;
    out.center = rc.center - (t_sharp / c.mu0) * p;
    return out;
}

} // namespace vortex
