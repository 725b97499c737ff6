#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

#include "vortex/constants.hpp"
#include "vortex/errors.hpp"
#include "vortex/vec3.hpp"

namespace vortex {

/// Dawson function D+(x) = exp(-x^2) int_0^x exp(t^2) dt.
///
/// Two regimes, both evaluated in 80-bit precision: the positive-term
/// confluent series exp(-x^2) sum_n x^(2n+1) / ((2n+1) n!) for |x| <= 6,
/// and the asymptotic series (1/2x) sum_k (2k-1)!! / (2x^2)^k beyond,
/// truncated at its smallest term. Absolute error stays below 1e-14 on
/// [0, 50] (and beyond); odd extension for negative arguments.
inline double dawson(double x) {
    if (x < 0.0) return -dawson(-x);
    if (x == 0.0) return 0.0;
    if (x <= 6.0) {
        const long double x2 = static_cast<long double>(x) * x;
        long double u = x;        // x^(2n+1) / n!
        long double sum = u;      // n = 0 contribution: u / (2n+1) = x
        for (int n = 1; n < 512; ++n) {
            u *= x2 / n;
            const long double term = u / (2 * n + 1);
            sum += term;
            if (term < 1e-21L * sum && static_cast<long double>(n) > x2) break;
        }
        return static_cast<double>(std::exp(-x2) * sum);
    }
    const long double inv2x2 = 0.5L / (static_cast<long double>(x) * x);
    long double term = 1.0L, sum = 1.0L;
    for (int k = 1; k < 256; ++k) {
        const long double next = term * (2 * k - 1) * inv2x2;
        if (next >= term) break; // asymptotic tail started growing
        term = next;
        sum += term;
        if (term < 1e-22L * sum) break;
    }
    return static_cast<double>(sum / (2.0L * x));
}

/// Poisson-weighted series sum_{n=0..N} e^-lambda lambda^n / n! * g(n) with
/// the truncation rule N = ceil(lambda + 12 sqrt(lambda) + 30). Terms in the
/// lower 12-sigma tail (below 1e-31 relative) are skipped; weights are built
/// by recurrence from the mode so no factorial ever overflows. After the
/// sweep the first omitted term is checked against 1e-15 of the partial sum.
template <class G>
double poisson_weighted_sum(double lambda, G&& g) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw ValidationError("poisson_weighted_sum: lambda must be finite and >= 0");
    if (lambda == 0.0) return g(std::int64_t{0});
    const double sd = std::sqrt(lambda);
    const auto n_hi = static_cast<std::int64_t>(std::ceil(lambda + 12.0 * sd + 30.0));
    const auto n_lo =
        std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(lambda - 12.0 * sd - 30.0)));
    auto n0 = static_cast<std::int64_t>(lambda);
    n0 = std::min(std::max(n0, n_lo), n_hi);
    const long double llam = std::log(static_cast<long double>(lambda));
    const long double lw0 = -static_cast<long double>(lambda) +
                            (n0 > 0 ? static_cast<long double>(n0) * llam : 0.0L) -
                            std::lgamma(static_cast<long double>(n0) + 1.0L);
    // The common scale w0 inherits the lgamma rounding; dividing by the
    // summed weights (which cover all but an exp(-72) tail) cancels it.
    const long double w0 = std::exp(lw0);
    long double acc = w0 * static_cast<long double>(g(n0));
    long double total = w0;
    long double w = w0;
    for (std::int64_t n = n0 + 1; n <= n_hi; ++n) {
        w *= lambda / static_cast<long double>(n);
        acc += w * static_cast<long double>(g(n));
        total += w;
    }
    const long double w_tail = w * lambda / static_cast<long double>(n_hi + 1);
    w = w0;
    for (std::int64_t n = n0; n > n_lo; --n) {
        w *= static_cast<long double>(n) / lambda;
        acc += w * static_cast<long double>(g(n - 1));
        total += w;
    }
    const long double tail = w_tail * std::abs(static_cast<long double>(g(n_hi + 1)));
    if (!(tail <= 1e-15L * std::abs(acc) + 1e-300L))
        throw NumericalError("poisson_weighted_sum: truncated tail above tolerance");
    return static_cast<double>(acc / total);
}

/// Coherent amplitude attached to a tangent circle of radius R(s). The
/// phase is constant along the curve; only |beta| carries geometry.
struct CoherentAmplitude {
    double abs_beta = 0.0;
    double arg_beta = 0.0;

    double abs2() const { return abs_beta * abs_beta; }
};

/// Inversion of R^2 = Rf^2 [1 + sigma^2 (|beta|^2 + 1/2)]:
/// |beta|^2 = ((R/Rf)^2 - 1)/sigma^2 - 1/2, defined for R >= R0.
inline CoherentAmplitude beta_from_radius(double R, const PhysicalConstants& c,
                                          double arg_beta = 0.0) {
    const DerivedScales d = derive_scales(c);
    if (!(d.sigma_ph > 0.0))
        throw ValidationError("beta_from_radius: requires hbar > 0 (sigma_ph > 0)");
    const double ratio2 = (R / c.Rf) * (R / c.Rf);
    const double s2 = d.sigma_ph * d.sigma_ph;
    double beta2 = (ratio2 - 1.0) / s2 - 0.5;
    // forgive rounding at R == R0 exactly
    const double fuzz = 1e-9 * std::max(1.0, ratio2 / s2);
    if (beta2 < 0.0 && beta2 > -fuzz) beta2 = 0.0;
    if (beta2 < 0.0)
        throw SubQuantumRadiusError(
            "beta_from_radius: R = " + std::to_string(R) +
            " is below the minimal quantum radius R0 = " +
            std::to_string(c.Rf * std::sqrt(1.0 + 0.5 * s2)));
    return {std::sqrt(beta2), arg_beta};
}

/// Forward direction of the same identity (exact algebraic inverse).
inline double radius_from_beta(const CoherentAmplitude& b, const PhysicalConstants& c) {
    const DerivedScales d = derive_scales(c);
    const double s2 = d.sigma_ph * d.sigma_ph;
    return c.Rf * std::sqrt(1.0 + s2 * (b.abs2() + 0.5));
}

/// Oscillator overlap <n|beta> = beta^n exp(-|beta|^2/2) / sqrt(n!),
/// evaluated in log space so large n never overflows.
inline std::complex<double> number_overlap(std::int64_t n, const CoherentAmplitude& b) {
    if (n < 0) throw ValidationError("number_overlap: n must be >= 0");
    if (b.abs_beta == 0.0) return {n == 0 ? 1.0 : 0.0, 0.0};
    const double log_mag = n * std::log(b.abs_beta) - 0.5 * b.abs2() -
                           0.5 * std::lgamma(static_cast<double>(n) + 1.0);
    const double mag = std::exp(log_mag);
    const double phase = static_cast<double>(n) * b.arg_beta;
    return {mag * std::cos(phase), mag * std::sin(phase)};
}

/// Isotropic Gaussian wave packet replacing the sharp position eigenstate:
/// centered at the evolute point with momentum p = hbar k(ell) b.
struct GaussianPacket {
    Vec3 center_q;       ///< packet center in position space
    Vec3 center_p;       ///< packet center in momentum space
    double width = 1.0;  ///< epsilon [m]
    double hbar = 1.0;

    /// B_eps = (eps/hbar)^(3/2) (2/pi)^(3/4)
    double norm_b() const {
        return std::pow(width / hbar, 1.5) * std::pow(2.0 / M_PI, 0.75);
    }
};

/// Momentum-space probability density |<p|z>|^2 =
/// B^2 exp[-(2 eps^2/hbar^2)(p - p0)^2]; integrates to 1 over d^3p.
inline double packet_momentum_density(const Vec3& p, const GaussianPacket& pkt) {
    const double b = pkt.norm_b();
    const Vec3 dp = p - pkt.center_p;
    const double a = 2.0 * pkt.width * pkt.width / (pkt.hbar * pkt.hbar);
    return b * b * std::exp(-a * norm2(dp));
}

/// Closed-form overlap <g|z> of a real isotropic Gaussian g (width g_width,
/// center g_center, unit L2 norm) with the packet:
/// per-axis Gaussian x Gaussian integrals, done jointly as vectors.
inline std::complex<double> packet_position_overlap(const Vec3& g_center, double g_width,
                                                    const GaussianPacket& pkt) {
    const double e2 = pkt.width * pkt.width;
    const double g2 = g_width * g_width;
    const double alpha = 0.25 / g2 + 0.25 / e2;
    const Vec3 a_vec = g_center / (2.0 * g2) + pkt.center_q / (2.0 * e2);
    const Vec3 b_vec = pkt.center_p / pkt.hbar;
    const double re = (norm2(a_vec) - norm2(b_vec)) / (4.0 * alpha) -
                      norm2(g_center) / (4.0 * g2) - norm2(pkt.center_q) / (4.0 * e2);
    const double im = dot(a_vec, b_vec) / (2.0 * alpha);
    const double c_g = std::pow(2.0 * M_PI * g2, -0.75);
    const double c_e = std::pow(2.0 * M_PI * e2, -0.75);
    const double amp = c_g * c_e * std::pow(M_PI / alpha, 1.5) * std::exp(re);
    return {amp * std::cos(im), amp * std::sin(im)};
}

} // namespace vortex
