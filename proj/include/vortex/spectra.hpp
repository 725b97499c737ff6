#pragma once

#include <cmath>
#include <cstdint>

#include "vortex/constants.hpp"
#include "vortex/errors.hpp"

namespace vortex {

/// Quantum numbers of a circular ring: continuous wavenumber k = |p|/hbar,
/// oscillator level n, and the sign of k.b.
struct RingQuantumNumbers {
    double k = 0.0;       ///< |p| / hbar [1/m], continuous
    std::int64_t n = 0;   ///< oscillator quantum number, n >= 0
    int epsilon_sign = 1; ///< sgn(k . b), +1 or -1

    void validate() const {
        if (!(k >= 0.0)) throw ValidationError("RingQuantumNumbers: k must be >= 0");
        if (n < 0) throw ValidationError("RingQuantumNumbers: n must be >= 0");
        if (epsilon_sign != 1 && epsilon_sign != -1)
            throw ValidationError("RingQuantumNumbers: epsilon_sign must be +1 or -1");
    }
};

// The eigenvalue formulas are evaluated in extended precision internally so
// that large-n regimes (n beyond 1e6) keep full double accuracy.

template <class Real>
Real radius_eigenvalue_impl(std::int64_t n, Real Rf, Real sigma_ph) {
    return Rf * std::sqrt(Real(1) + sigma_ph * sigma_ph * (Real(n) + Real(0.5)));
}

template <class Real>
Real circulation_plus_impl(double k, std::int64_t n, Real hbar, Real Rf, Real mutilde0,
                           Real sigma_ph) {
    const Real denom = Real(1) + sigma_ph * sigma_ph * (Real(n) + Real(0.5));
    return hbar * Real(k) * Rf / (mutilde0 * denom);
}

template <class Real>
Real energy_eigenvalue_impl(double k, std::int64_t n, Real hbar, Real Rf, Real mutilde0,
                            Real sigma_ph, Real L, Real omega) {
    const Real s2 = sigma_ph * sigma_ph;
    const Real denom = Real(1) + s2 * (Real(n) + Real(0.5));
    const Real kk = Real(k);
    const Real bracket = omega * (Real(2 * n) + Real(1)) + s2 * (kk * L) * (kk * L);
    return hbar * hbar * kk / (Real(8) * Real(M_PI) * mutilde0 * Rf) * bracket / (denom * denom);
}

/// R_n = Rf sqrt(1 + sigma^2 (n + 1/2)); strictly increasing in n.
inline double radius_eigenvalue(std::int64_t n, const PhysicalConstants& c) {
    if (n < 0) throw ValidationError("radius_eigenvalue: n must be >= 0");
    const DerivedScales d = derive_scales(c);
    return static_cast<double>(
        radius_eigenvalue_impl<long double>(n, c.Rf, d.sigma_ph));
}

/// Gamma+_{k,n} = hbar k Rf / (mutilde0 [1 + sigma^2 (n + 1/2)]) > 0 for k > 0.
inline double circulation_plus(double k, std::int64_t n, const PhysicalConstants& c) {
    if (n < 0) throw ValidationError("circulation_plus: n must be >= 0");
    if (!(k >= 0.0)) throw ValidationError("circulation_plus: k must be >= 0");
    const DerivedScales d = derive_scales(c);
    return static_cast<double>(circulation_plus_impl<long double>(
        k, n, c.hbar, c.Rf, d.mutilde0, d.sigma_ph));
}

/// Signed circulation eigenvalue, Gamma = epsilon Gamma+.
inline double circulation_eigenvalue(const RingQuantumNumbers& q, const PhysicalConstants& c) {
    q.validate();
    return q.epsilon_sign * circulation_plus(q.k, q.n, c);
}

/// Real-time energy eigenvalue
///   E_n(k) = (hbar^2 k / (8 pi mutilde0 Rf))
///            [omega (2n+1) + sigma^2 (kL)^2] / [1 + sigma^2 (n+1/2)]^2.
inline double energy_eigenvalue(const RingQuantumNumbers& q, const PhysicalConstants& c) {
    q.validate();
    const DerivedScales d = derive_scales(c);
    return static_cast<double>(energy_eigenvalue_impl<long double>(
        q.k, q.n, c.hbar, c.Rf, d.mutilde0, d.sigma_ph, c.L, c.omega));
}

} // namespace vortex
