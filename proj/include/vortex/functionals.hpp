#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "vortex/coherent.hpp"
#include "vortex/constants.hpp"
#include "vortex/errors.hpp"
#include "vortex/geometry.hpp"
#include "vortex/quadrature.hpp"
#include "vortex/spectra.hpp"

namespace vortex {

// ---------------------------------------------------------------------------
// Radial reduction of the 3D momentum integrals.
//
// Every observable needs moments E[|k|^m] of the isotropic Gaussian
// exp(-a (k - k0 b)^2) with a = 2 eps^2. Isotropy about b reduces the
// angular integral to a sinh kernel; the remaining radial integral is done
// by adaptive quadrature at 1e-10 relative tolerance. The reduction is
// exact; the difference-of-exponentials form never overflows and the sinh
// branch avoids cancellation for small arguments.
// ---------------------------------------------------------------------------

namespace detail {

inline double reduced_gauss_kernel(double k, double k0, double a) {
    const double w = 2.0 * a * k * k0;
    if (w <= 30.0) return std::exp(-a * (k * k + k0 * k0)) * 2.0 * std::sinh(w);
    const double dm = k - k0, dp = k + k0;
    return std::exp(-a * dm * dm) - std::exp(-a * dp * dp);
}

} // namespace detail

/// E[|k|^m] for k ~ Normal(k0 b, (2a)^-1 I3); m = 1, 2, 3, ...
inline double gaussian_abs_moment(int m, double k0, double a, double rel_tol = 1e-10) {
    if (!(a > 0.0)) throw ValidationError("gaussian_abs_moment: a must be > 0");
    if (k0 < 0.0) k0 = -k0; // moment depends on |k0|
    const double spread = 1.0 / std::sqrt(a);
    const double norm3 = std::pow(a / M_PI, 1.5);
    if (k0 * std::sqrt(a) < 1e-8) {
        const double upper = 12.0 * spread;
        const double radial = integrate_adaptive(
            [&](double k) { return std::pow(k, m + 2) * std::exp(-a * k * k); }, 0.0, upper,
            rel_tol);
        return norm3 * 4.0 * M_PI * radial;
    }
    const double upper = k0 + 12.0 * spread;
    const double radial = integrate_adaptive(
        [&](double k) { return std::pow(k, m + 1) * detail::reduced_gauss_kernel(k, k0, a); },
        0.0, upper, rel_tol);
    return norm3 * (M_PI / (a * k0)) * radial;
}

// ---------------------------------------------------------------------------
// Poisson-weighted oscillator sums shared by the circulation and energy
// functionals. D_n = 1 + sigma^2 (n + 1/2).
// ---------------------------------------------------------------------------

struct SeriesFactors {
    double inv_d;       ///< E[1 / D_n]
    double level_d2;    ///< E[(2n+1) / D_n^2]
    double inv_d2;      ///< E[1 / D_n^2]
};

inline SeriesFactors series_factors(double beta_abs2, double sigma_ph) {
    const double s2 = sigma_ph * sigma_ph;
    auto dn = [s2](std::int64_t n) { return 1.0 + s2 * (static_cast<double>(n) + 0.5); };
    SeriesFactors f;
    f.inv_d = poisson_weighted_sum(beta_abs2, [&](std::int64_t n) { return 1.0 / dn(n); });
    f.level_d2 = poisson_weighted_sum(beta_abs2, [&](std::int64_t n) {
        const double d = dn(n);
        return (2.0 * static_cast<double>(n) + 1.0) / (d * d);
    });
    f.inv_d2 = poisson_weighted_sum(beta_abs2, [&](std::int64_t n) {
        const double d = dn(n);
        return 1.0 / (d * d);
    });
    return f;
}

/// The |beta|-dependent factor of the circulation functional,
/// e^{-|b|^2} sum_n |b|^{2n} / (n! [1 + sigma^2(n+1/2)]).
inline double circulation_series(double beta_abs2, double sigma_ph) {
    const double s2 = sigma_ph * sigma_ph;
    return poisson_weighted_sum(beta_abs2, [s2](std::int64_t n) {
        return 1.0 / (1.0 + s2 * (static_cast<double>(n) + 0.5));
    });
}

// ---------------------------------------------------------------------------
// Pointwise observables from the reduced pieces. The packet expectation of
// |p| combines with |B|^2 so that
//   Gamma+ = (Rf / mutilde0) * S1 * hbar * E[|k|]
//   E      = (hbar^2 / (8 pi mutilde0 Rf)) * (omega S2 E[|k|] + sigma^2 L^2 S3 E[|k|^3])
// with S1 = E[1/D], S2 = E[(2n+1)/D^2], S3 = E[1/D^2] under Poisson(|beta|^2).
// ---------------------------------------------------------------------------

inline double gamma_plus_from_parts(double beta_abs2, double k0, const PhysicalConstants& c,
                                    const DerivedScales& d) {
    const double a = 2.0 * c.epsilon_pkt * c.epsilon_pkt;
    const double s1 = circulation_series(beta_abs2, d.sigma_ph);
    return c.Rf / d.mutilde0 * s1 * c.hbar * gaussian_abs_moment(1, k0, a);
}

inline double energy_density_from_parts(double beta_abs2, double k0,
                                        const PhysicalConstants& c, const DerivedScales& d) {
    const double a = 2.0 * c.epsilon_pkt * c.epsilon_pkt;
    const SeriesFactors f = series_factors(beta_abs2, d.sigma_ph);
    const double ce = c.hbar * c.hbar / (8.0 * M_PI * d.mutilde0 * c.Rf);
    const double m1 = gaussian_abs_moment(1, k0, a);
    const double m3 = gaussian_abs_moment(3, k0, a);
    const double s2 = d.sigma_ph * d.sigma_ph;
    return ce * (c.omega * f.level_d2 * m1 + s2 * c.L * c.L * f.inv_d2 * m3);
}

// ---------------------------------------------------------------------------
// Monte Carlo cross-checks of the radial reduction (verification path only;
// never part of the deterministic pipeline). Box-Muller on mt19937_64 keeps
// the sample sequence reproducible for a fixed seed.
// ---------------------------------------------------------------------------

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

namespace detail {

class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t seed) : rng_(seed) {}

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53; // (0,1]
        const double u2 = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * M_PI * u2;
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

private:
    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

template <class F>
McEstimate mc_packet_expectation(F&& f, double k0, double a, std::size_t samples,
                                 std::uint64_t seed) {
    NormalSampler normal(seed);
    const double sd = std::sqrt(0.5 / a); // per-axis std of the k-space Gaussian
    double mean = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        const double kx = sd * normal();
        const double ky = sd * normal();
        const double kz = k0 + sd * normal();
        const double y = f(std::sqrt(kx * kx + ky * ky + kz * kz));
        const double delta = y - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (y - mean);
    }
    const double var = m2 / static_cast<double>(samples - 1);
    return {mean, std::sqrt(var / static_cast<double>(samples))};
}

} // namespace detail

inline McEstimate mc_gamma_plus(double beta_abs2, double k0, const PhysicalConstants& c,
                                const DerivedScales& d, std::size_t samples,
                                std::uint64_t seed) {
    const double a = 2.0 * c.epsilon_pkt * c.epsilon_pkt;
    const double pref = c.Rf / d.mutilde0 * circulation_series(beta_abs2, d.sigma_ph) * c.hbar;
    const McEstimate m =
        detail::mc_packet_expectation([](double k) { return k; }, k0, a, samples, seed);
    return {pref * m.value, pref * m.std_error};
}

inline McEstimate mc_energy_density(double beta_abs2, double k0, const PhysicalConstants& c,
                                    const DerivedScales& d, std::size_t samples,
                                    std::uint64_t seed) {
    const double a = 2.0 * c.epsilon_pkt * c.epsilon_pkt;
    const SeriesFactors f = series_factors(beta_abs2, d.sigma_ph);
    const double ce = c.hbar * c.hbar / (8.0 * M_PI * d.mutilde0 * c.Rf);
    const double s2 = d.sigma_ph * d.sigma_ph;
    const double c1 = ce * c.omega * f.level_d2;
    const double c3 = ce * s2 * c.L * c.L * f.inv_d2;
    return detail::mc_packet_expectation(
        [c1, c3](double k) { return c1 * k + c3 * k * k * k; }, k0, a, samples, seed);
}

// ---------------------------------------------------------------------------
// Filament state: curve + constants + weight density |f|^2 + momentum
// profile k(ell). Immutable; observables are pure point queries plus
// sampled profiles on a uniform arc-length grid.
// ---------------------------------------------------------------------------

/// Smooth periodic momentum profile on the evolute, Fourier in ell over the
/// total evolute length. For a degenerate (point) evolute the value is the
/// constant a0 + sum a_m.
struct KOfEll {
    double a0 = 0.0;
    std::vector<double> a; ///< cos coefficients, m = 1..
    std::vector<double> b; ///< sin coefficients, m = 1..

    double eval(double ell, double ell_total) const {
        double acc = a0;
        if (ell_total <= 0.0) {
            for (double am : a) acc += am;
            return acc;
        }
        const double base = 2.0 * M_PI * ell / ell_total;
        for (std::size_t m = 0; m < a.size(); ++m) acc += a[m] * std::cos((m + 1) * base);
        for (std::size_t m = 0; m < b.size(); ++m) acc += b[m] * std::sin((m + 1) * base);
        return acc;
    }
};

/// Specification of the weight density |f(s)|^2 before normalization.
struct WeightSpec {
    enum class Family { uniform, gaussian_bump, custom };
    Family family = Family::uniform;
    double center = 0.0; ///< gaussian_bump: bump location [m]
    double width = 1.0;  ///< gaussian_bump: bump width [m]
    std::vector<double> s_samples; ///< custom: ascending within [0, S)
    std::vector<double> values;    ///< custom: non-negative samples
};

enum class SampleFlag { ok, flex, subquantum, gap };

enum class ProfileKind { gamma_plus, gamma_signed, energy_density, vorticity_perp };

/// Sampled scalar field along the filament.
struct Profile {
    ProfileKind kind;
    std::vector<double> grid;       ///< s_i, strictly increasing in [0, S)
    std::vector<double> values;
    std::vector<SampleFlag> flags;  ///< per-sample status; value valid iff ok
};

class FilamentState {
public:
    struct Point {
        CurveFrame frame;
        CoherentAmplitude beta;
        GaussianPacket packet;
        double k0 = 0.0;
        SampleFlag status = SampleFlag::ok;
    };

    FilamentState(ClosedCurve curve, const PhysicalConstants& c, WeightSpec weight,
                  KOfEll k_of_ell, int grid_size)
        : curve_(std::move(curve)),
          constants_(c),
          scales_(derive_scales(c)),
          weight_(std::move(weight)),
          k_of_ell_(std::move(k_of_ell)),
          grid_size_(grid_size) {
        if (grid_size_ < 64) throw ValidationError("FilamentState: grid size must be >= 64");
        validate_weight_spec();
        // Normalize |f|^2 with the same rectangle rule every functional uses,
        // so Tr rho = 1 holds exactly on this grid.
        const double S = curve_.total_length();
        double z = 0.0;
        for (int i = 0; i < grid_size_; ++i) z += raw_weight(grid_s(i));
        z *= S / grid_size_;
        if (!(z > 0.0)) throw ValidationError("FilamentState: weight density is identically zero");
        weight_norm_ = 1.0 / z;
    }

    const ClosedCurve& curve() const { return curve_; }
    const PhysicalConstants& constants() const { return constants_; }
    const DerivedScales& scales() const { return scales_; }
    int grid_size() const { return grid_size_; }
    double grid_s(int i) const { return curve_.total_length() * i / grid_size_; }

    /// Normalized weight density |f(s)|^2.
    double weight_density(double s) const { return raw_weight(curve_.wrap_s(s)) * weight_norm_; }
    /// f(s) taken real and non-negative: sqrt of the density.
    double f_amplitude(double s) const { return std::sqrt(weight_density(s)); }

    Point point_at(double s) const {
        Point p;
        p.frame = curve_.frame(s);
        if (p.frame.flex) {
            p.status = SampleFlag::flex;
            return p;
        }
        try {
            p.beta = beta_from_radius(p.frame.radius, constants_);
        } catch (const SubQuantumRadiusError&) {
            p.status = SampleFlag::subquantum;
            return p;
        }
        p.k0 = k_of_ell_.eval(*p.frame.ell, curve_.evolute_param().ell_total);
        p.packet.center_q = *p.frame.evolute;
        p.packet.center_p = (constants_.hbar * p.k0) * p.frame.b_hat;
        p.packet.width = constants_.epsilon_pkt;
        p.packet.hbar = constants_.hbar;
        return p;
    }

    const KOfEll& momentum_profile() const { return k_of_ell_; }

private:
    void validate_weight_spec() const {
        if (weight_.family == WeightSpec::Family::gaussian_bump && !(weight_.width > 0.0))
            throw ValidationError("WeightSpec: gaussian bump width must be > 0");
        if (weight_.family == WeightSpec::Family::custom) {
            const double S = curve_.total_length();
            if (weight_.s_samples.size() < 2 ||
                weight_.s_samples.size() != weight_.values.size())
                throw ValidationError("WeightSpec: custom family needs matching sample arrays");
            for (std::size_t i = 0; i < weight_.s_samples.size(); ++i) {
                if (weight_.values[i] < 0.0)
                    throw ValidationError("WeightSpec: custom weights must be non-negative");
                if (weight_.s_samples[i] < 0.0 || weight_.s_samples[i] >= S)
                    throw ValidationError("WeightSpec: custom abscissae must lie in [0, S)");
                if (i > 0 && weight_.s_samples[i] <= weight_.s_samples[i - 1])
                    throw ValidationError("WeightSpec: custom abscissae must increase");
            }
        }
    }

    double raw_weight(double s) const {
        switch (weight_.family) {
            case WeightSpec::Family::uniform:
                return 1.0;
            case WeightSpec::Family::gaussian_bump: {
                const double S = curve_.total_length();
                double dist = std::abs(s - weight_.center);
                dist = std::min(dist, S - dist);
                return std::exp(-0.5 * dist * dist / (weight_.width * weight_.width));
            }
            case WeightSpec::Family::custom: {
                // periodic linear interpolation
                const double S = curve_.total_length();
                const auto& xs = weight_.s_samples;
                const auto& ys = weight_.values;
                auto it = std::upper_bound(xs.begin(), xs.end(), s);
                if (it == xs.begin() || it == xs.end()) {
                    const double x0 = xs.back(), x1 = xs.front() + S;
                    const double y0 = ys.back(), y1 = ys.front();
                    double ss = (it == xs.begin()) ? s + S : s;
                    return y0 + (y1 - y0) * (ss - x0) / (x1 - x0);
                }
                const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
                return ys[i] + (ys[i + 1] - ys[i]) * (s - xs[i]) / (xs[i + 1] - xs[i]);
            }
        }
        return 0.0;
    }

    ClosedCurve curve_;
    PhysicalConstants constants_;
    DerivedScales scales_;
    WeightSpec weight_;
    KOfEll k_of_ell_;
    int grid_size_;
    double weight_norm_ = 1.0;
};

// ---------------------------------------------------------------------------
// Pointwise functionals and profiles.
// ---------------------------------------------------------------------------

/// Gamma+(s); throws for flex or sub-quantum points.
inline double gamma_plus_at(const FilamentState& state, double s) {
    const auto p = state.point_at(s);
    if (p.status == SampleFlag::flex)
        throw FlexPointError("gamma_plus_at: s = " + std::to_string(s) +
                             " lies in a flex interval; use the disconnection path");
    if (p.status == SampleFlag::subquantum)
        throw SubQuantumRadiusError("gamma_plus_at: curvature radius below R0 at s = " +
                                    std::to_string(s));
    return gamma_plus_from_parts(p.beta.abs2(), p.k0, state.constants(), state.scales());
}

/// Signed circulation Gamma(s) = sgn[k(ell(s))] Gamma+(s); zero exactly
/// where k vanishes.
inline double gamma_signed_at(const FilamentState& state, double s) {
    const auto p = state.point_at(s);
    if (p.status == SampleFlag::flex)
        throw FlexPointError("gamma_signed_at: flex point at s = " + std::to_string(s));
    if (p.status == SampleFlag::subquantum)
        throw SubQuantumRadiusError("gamma_signed_at: sub-quantum radius at s = " +
                                    std::to_string(s));
    const int sign = (p.k0 > 0.0) - (p.k0 < 0.0);
    if (sign == 0) return 0.0;
    return sign * gamma_plus_from_parts(p.beta.abs2(), p.k0, state.constants(), state.scales());
}

/// Packet-averaged energy density E(s); throws as gamma_plus_at.
inline double energy_at(const FilamentState& state, double s) {
    const auto p = state.point_at(s);
    if (p.status == SampleFlag::flex)
        throw FlexPointError("energy_at: flex point at s = " + std::to_string(s));
    if (p.status == SampleFlag::subquantum)
        throw SubQuantumRadiusError("energy_at: sub-quantum radius at s = " + std::to_string(s));
    return energy_density_from_parts(p.beta.abs2(), p.k0, state.constants(), state.scales());
}

namespace detail {

template <class PointValue>
Profile sampled_profile(const FilamentState& state, ProfileKind kind, PointValue&& value) {
    Profile prof;
    prof.kind = kind;
    const int n = state.grid_size();
    prof.grid.resize(n);
    prof.values.assign(n, 0.0);
    prof.flags.assign(n, SampleFlag::ok);
    for (int i = 0; i < n; ++i) {
        prof.grid[i] = state.grid_s(i);
        const auto p = state.point_at(prof.grid[i]);
        if (p.status != SampleFlag::ok) {
            prof.flags[i] = p.status;
            prof.values[i] = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        prof.values[i] = value(p);
    }
    return prof;
}

} // namespace detail

inline Profile gamma_plus_profile(const FilamentState& state) {
    return detail::sampled_profile(state, ProfileKind::gamma_plus, [&](const FilamentState::Point& p) {
        return gamma_plus_from_parts(p.beta.abs2(), p.k0, state.constants(), state.scales());
    });
}

inline Profile gamma_signed_profile(const FilamentState& state) {
    return detail::sampled_profile(
        state, ProfileKind::gamma_signed, [&](const FilamentState::Point& p) {
            const int sign = (p.k0 > 0.0) - (p.k0 < 0.0);
            if (sign == 0) return 0.0;
            return sign *
                   gamma_plus_from_parts(p.beta.abs2(), p.k0, state.constants(), state.scales());
        });
}

inline Profile energy_profile(const FilamentState& state) {
    return detail::sampled_profile(state, ProfileKind::energy_density,
                                   [&](const FilamentState::Point& p) {
                                       return energy_density_from_parts(
                                           p.beta.abs2(), p.k0, state.constants(), state.scales());
                                   });
}

/// |dGamma/ds| / (2 pi a) by 4th-order central differences on the uniform
/// grid of a signed-circulation profile. Samples whose stencil touches a
/// flagged point become gaps.
inline Profile vorticity_perp_profile(const FilamentState& state, const Profile& gamma_signed) {
    if (gamma_signed.kind != ProfileKind::gamma_signed)
        throw ValidationError("vorticity_perp_profile: needs a gamma_signed profile");
    const int n = static_cast<int>(gamma_signed.grid.size());
    Profile prof;
    prof.kind = ProfileKind::vorticity_perp;
    prof.grid = gamma_signed.grid;
    prof.values.assign(n, 0.0);
    prof.flags.assign(n, SampleFlag::ok);
    const double h = state.curve().total_length() / n;
    const double core = 2.0 * M_PI * state.constants().core_a;
    for (int i = 0; i < n; ++i) {
        const int im2 = (i - 2 + n) % n, im1 = (i - 1 + n) % n;
        const int ip1 = (i + 1) % n, ip2 = (i + 2) % n;
        const bool bad = gamma_signed.flags[i] != SampleFlag::ok ||
                         gamma_signed.flags[im2] != SampleFlag::ok ||
                         gamma_signed.flags[im1] != SampleFlag::ok ||
                         gamma_signed.flags[ip1] != SampleFlag::ok ||
                         gamma_signed.flags[ip2] != SampleFlag::ok;
        if (bad) {
            prof.flags[i] = gamma_signed.flags[i] == SampleFlag::ok ? SampleFlag::gap
                                                                    : gamma_signed.flags[i];
            prof.values[i] = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        const double d = (-gamma_signed.values[ip2] + 8.0 * gamma_signed.values[ip1] -
                          8.0 * gamma_signed.values[im1] + gamma_signed.values[im2]) /
                         (12.0 * h);
        prof.values[i] = std::abs(d) / core;
    }
    return prof;
}

/// Weighted loop integral of a profile: integral |f|^2 v(s) ds by the same
/// rectangle rule that normalizes |f|^2. `partial` reports skipped samples.
struct LoopIntegral {
    double value = 0.0;
    bool partial = false;
};

inline LoopIntegral loop_integral(const FilamentState& state, const Profile& prof) {
    LoopIntegral out;
    const double S = state.curve().total_length();
    const int n = static_cast<int>(prof.grid.size());
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        if (prof.flags[i] != SampleFlag::ok) {
            out.partial = true;
            continue;
        }
        acc += state.weight_density(prof.grid[i]) * prof.values[i];
    }
    out.value = acc * S / n;
    return out;
}

/// E[r] = loop integral of |f|^2 E(s).
inline LoopIntegral energy_total(const FilamentState& state) {
    return loop_integral(state, energy_profile(state));
}

/// Gamma+[r] = loop integral of |f|^2 Gamma+(s).
inline LoopIntegral gamma_plus_total(const FilamentState& state) {
    return loop_integral(state, gamma_plus_profile(state));
}

/// Transition probability from a localized micro-vortex state (isotropic
/// Gaussian g of the given width and center, oscillator level n) into the
/// filament state, with multiplicity N: min(1, N |A|^2),
/// A = loop integral of f(s) <g|z(s)> <n|beta(s)>. The q-integral is closed
/// form; the s-integral uses the grid rectangle rule. Values are clamped at
/// 1 (the multiplicity argument is heuristic).
inline double transition_probability(double g_width, const Vec3& g_center, std::int64_t n,
                                     const FilamentState& state, double multiplicity) {
    if (!(g_width > 0.0)) throw ValidationError("transition_probability: g_width must be > 0");
    if (multiplicity < 1.0)
        throw ValidationError("transition_probability: multiplicity must be >= 1");
    const int grid = state.grid_size();
    const double S = state.curve().total_length();
    std::complex<double> amp{0.0, 0.0};
    for (int i = 0; i < grid; ++i) {
        const double s = state.grid_s(i);
        const auto p = state.point_at(s);
        if (p.status != SampleFlag::ok) continue;
        const double f = state.f_amplitude(s);
        if (f == 0.0) continue;
        amp += f * packet_position_overlap(g_center, g_width, p.packet) *
               number_overlap(n, p.beta);
    }
    amp *= S / grid;
    const double prob = multiplicity * std::norm(amp);
    return std::min(1.0, prob);
}

// ---------------------------------------------------------------------------
// Large-radius asymptotics: log-log slope of Gamma+ against R for a family
// of circles at fixed k.
// ---------------------------------------------------------------------------

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double std_error = 0.0;   ///< OLS standard error of the slope
    double ci95 = 0.0;        ///< 1.96 * std_error
    bool narrow_range = false; ///< fitted span below two decades
    std::vector<double> radii;
    std::vector<double> gamma_plus;
};

inline SlopeFit asymptotic_exponent(const PhysicalConstants& c, double r_min, double r_max,
                                    int points, double k0) {
    if (points < 2) throw ValidationError("asymptotic_exponent: need at least 2 points");
    if (!(r_min > 0.0) || !(r_max > r_min))
        throw ValidationError("asymptotic_exponent: need 0 < r_min < r_max");
    if (r_min / c.Rf < 100.0)
        throw ValidationError("asymptotic_exponent: asymptotic regime needs R/Rf >= 100");
    const DerivedScales d = derive_scales(c);
    SlopeFit fit;
    fit.narrow_range = std::log10(r_max / r_min) < 2.0 - 1e-9;
    std::vector<double> xs(points), ys(points);
    for (int i = 0; i < points; ++i) {
        const double t = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
        const double r = r_min * std::pow(r_max / r_min, t);
        const CoherentAmplitude b = beta_from_radius(r, c);
        const double g = gamma_plus_from_parts(b.abs2(), k0, c, d);
        fit.radii.push_back(r);
        fit.gamma_plus.push_back(g);
        xs[i] = std::log(r);
        ys[i] = std::log(g);
    }
    double xbar = 0.0, ybar = 0.0;
    for (int i = 0; i < points; ++i) { xbar += xs[i]; ybar += ys[i]; }
    xbar /= points;
    ybar /= points;
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < points; ++i) {
        sxx += (xs[i] - xbar) * (xs[i] - xbar);
        sxy += (xs[i] - xbar) * (ys[i] - ybar);
    }
    fit.slope = sxy / sxx;
    fit.intercept = ybar - fit.slope * xbar;
    double rss = 0.0;
    for (int i = 0; i < points; ++i) {
        const double resid = ys[i] - (fit.intercept + fit.slope * xs[i]);
        rss += resid * resid;
    }
    if (points > 2) fit.std_error = std::sqrt(rss / (points - 2) / sxx);
    fit.ci95 = 1.96 * fit.std_error;
    return fit;
}

} // namespace vortex
