#pragma once

#include <cmath>
#include <string>

#include "vortex/errors.hpp"

namespace vortex {

/// Fundamental and auxiliary constants of the model. All inputs are SI.
/// Immutable value type; validate() must pass before any derived quantity
/// is computed.
struct PhysicalConstants {
    double rho0 = 1.0;        ///< fluid mass density [kg/m^3]
    double v0 = 1.0;          ///< speed of sound [m/s]
    double Rf = 1.0;          ///< minimal filament radius / length constant [m]
    double mu0 = 1.0;         ///< central-charge "mass" [kg]
    double hbar = 1.0;        ///< Planck constant [J s]
    double L = 1.0;           ///< problem length scale [m], free config parameter
    double core_a = 0.1;      ///< filament core radius [m], core_a < Rf
    double omega = 1.0;       ///< dimensionless core-flow parameter
    double alpha = 1.0;       ///< dimensionless binormal-advection constant
    double epsilon_pkt = 1.0; ///< wave-packet width [m]

    void validate() const {
        auto positive = [](double v, const char* name) {
            if (!(v > 0.0) || !std::isfinite(v))
                throw ValidationError(std::string("PhysicalConstants: field '") + name +
                                      "' must be strictly positive");
        };
        positive(rho0, "rho0");
        positive(v0, "v0");
        positive(Rf, "Rf");
        positive(mu0, "mu0");
        positive(L, "L");
        positive(core_a, "core_a");
        positive(epsilon_pkt, "epsilon_pkt");
        if (hbar < 0.0 || !std::isfinite(hbar))
            throw ValidationError("PhysicalConstants: field 'hbar' must be non-negative");
        if (!std::isfinite(omega) || !std::isfinite(alpha))
            throw ValidationError("PhysicalConstants: fields 'omega'/'alpha' must be finite");
        if (!(core_a < Rf))
            throw ValidationError("PhysicalConstants: field 'core_a' must satisfy core_a < Rf");
    }
};

/// Scales derived from the fundamental constants; always recomputed, never
/// stored alongside them.
struct DerivedScales {
    double t0;       ///< time scale L / v0
    double E0;       ///< energy scale mu0 v0^2
    double mutilde0; ///< auxiliary mass pi rho0 Rf^3
    double sigma_ph; ///< dimensionless quantum scale sqrt(hbar / (E0 t0))
};

/// Pure, deterministic map from constants to the four derived scales.
inline DerivedScales derive_scales(const PhysicalConstants& c) {
    c.validate();
    DerivedScales d;
    d.t0 = c.L / c.v0;
    d.E0 = c.mu0 * c.v0 * c.v0;
    d.mutilde0 = M_PI * c.rho0 * c.Rf * c.Rf * c.Rf;
    d.sigma_ph = std::sqrt(c.hbar / (d.E0 * d.t0));
    return d;
}

/// All-ones preset; the reference inputs for the substitution checks.
inline PhysicalConstants unit_constants() {
    PhysicalConstants c;
    c.rho0 = c.v0 = c.Rf = c.mu0 = c.hbar = c.L = 1.0;
    c.core_a = 0.1;
    c.omega = 1.0;
    c.alpha = 1.0;
    c.epsilon_pkt = 1.0;
    return c;
}

/// Order-of-magnitude helium-II values, illustrative only.
inline PhysicalConstants helium_like_constants() {
    PhysicalConstants c;
    c.rho0 = 145.0;      // kg/m^3
    c.v0 = 238.0;        // m/s
    c.Rf = 1e-10;        // m
    c.mu0 = 1e-26;       // kg
    c.hbar = 1.054571817e-34;
    c.L = 1e-3;          // m
    c.core_a = 5e-11;    // m
    c.omega = 1.0;
    c.alpha = 1.0;
    c.epsilon_pkt = 1e-6; // m
    return c;
}

/// Lowest representable tangent-circle radius R0 = Rf sqrt(1 + sigma^2/2).
inline double minimal_quantum_radius(const PhysicalConstants& c) {
    const DerivedScales d = derive_scales(c);
    return c.Rf * std::sqrt(1.0 + 0.5 * d.sigma_ph * d.sigma_ph);
}

} // namespace vortex
