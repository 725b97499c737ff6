#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vortex/errors.hpp"
#include "vortex/interp.hpp"
#include "vortex/quadrature.hpp"
#include "vortex/vec3.hpp"

namespace vortex {

/// One coordinate of a closed curve as a truncated Fourier series in the
/// angle u in [0, 2pi). Derivatives of any order are exact.
struct FourierSeries {
    std::vector<double> cos_coef; ///< A_m, m = 0..M
    std::vector<double> sin_coef; ///< B_m, m = 0..M (B_0 has no effect)

    /// d-th derivative with respect to u.
    double eval(double u, int d = 0) const {
        // d/du^d of cos(mu) is m^d cos(mu + d pi/2); same shift for sin.
        double acc = (d == 0 && !cos_coef.empty()) ? cos_coef[0] : 0.0;
        const double shift = d * M_PI_2;
        for (std::size_t m = 1; m < cos_coef.size(); ++m) {
            const double md = std::pow(static_cast<double>(m), d);
            const double arg = m * u + shift;
            acc += md * cos_coef[m] * std::cos(arg);
            if (m < sin_coef.size()) acc += md * sin_coef[m] * std::sin(arg);
        }
        return acc;
    }

    std::size_t harmonics() const { return cos_coef.empty() ? 0 : cos_coef.size() - 1; }
};

/// Arc-length interval [begin, end) within [0, S); wrapping regions are
/// represented by their two pieces.
struct ArcInterval {
    double begin = 0.0;
    double end = 0.0;
    double length() const { return end - begin; }
};

/// Per-point geometric data of a closed curve. The curvature radius at a
/// flex point is conceptually +infinity; it is encoded by `flex`, never by
/// an overflowing float, and the evolute fields are absent there.
struct CurveFrame {
    double s = 0.0;              ///< arc length
    Vec3 r;                      ///< position
    Vec3 t_hat;                  ///< unit tangent
    double kappa = 0.0;          ///< curvature |d^2 r/ds^2|
    bool flex = false;           ///< curvature below the flex threshold
    double radius = 0.0;         ///< 1/kappa, valid iff !flex
    Vec3 b_hat;                  ///< unit binormal, valid iff !flex
    std::optional<Vec3> evolute; ///< q = r + R^2 d^2r/ds^2
    std::optional<double> ell;   ///< natural parameter along the evolute
};

/// Monotone u <-> s table built from cumulative per-panel Gauss-Legendre
/// quadrature of |r'(u)|. A monotone cubic provides fast guesses; refined
/// queries go through exact partial-panel quadrature.
class ArcLengthMap {
public:
    ArcLengthMap(std::function<double(double)> speed, int n_panels) : speed_(std::move(speed)) {
        if (n_panels < 8) throw ValidationError("ArcLengthMap: need at least 8 panels");
        knots_u_.resize(n_panels + 1);
        knots_s_.resize(n_panels + 1);
        knots_s_[0] = 0.0;
        for (int i = 0; i <= n_panels; ++i) knots_u_[i] = 2.0 * M_PI * i / n_panels;
        for (int i = 0; i < n_panels; ++i)
            knots_s_[i + 1] = knots_s_[i] + gauss16(speed_, knots_u_[i], knots_u_[i + 1]);
        total_ = knots_s_.back();
        forward_ = MonotoneCubic(knots_u_, knots_s_);
        inverse_ = MonotoneCubic(knots_s_, knots_u_);
        // Interpolation error observed at 7 interior points per panel against
        // quadrature, reported with a x2 safety factor.
        error_estimate_ = 0.0;
        for (int i = 0; i < n_panels; ++i) {
            for (int k = 1; k < 8; ++k) {
                const double um = knots_u_[i] + (knots_u_[i + 1] - knots_u_[i]) * k / 8.0;
                error_estimate_ =
                    std::max(error_estimate_, std::abs(forward_(um) - s_at(um)));
            }
        }
        error_estimate_ *= 2.0;
    }

    /// Arc length at angle u in [0, 2pi], exact to quadrature accuracy.
    double s_at(double u) const {
        u = std::clamp(u, 0.0, 2.0 * M_PI);
        const std::size_t i = panel_of(u);
        return knots_s_[i] + gauss16(speed_, knots_u_[i], u);
    }

    /// Inverse map: angle u for arc length s in [0, total]; safeguarded Newton.
    double u_at(double s) const {
        s = std::clamp(s, 0.0, total_);
        auto it = std::upper_bound(knots_s_.begin(), knots_s_.end(), s);
        std::size_t i = (it == knots_s_.begin()) ? 0 : static_cast<std::size_t>(it - knots_s_.begin()) - 1;
        i = std::min(i, knots_u_.size() - 2);
        double lo = knots_u_[i], hi = knots_u_[i + 1];
        double u = std::clamp(inverse_(s), lo, hi);
        for (int iter = 0; iter < 60; ++iter) {
            const double f = s_at(u) - s;
            if (f > 0.0) hi = u; else lo = u;
            double next = u - f / speed_(u);
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            if (std::abs(next - u) < 1e-15 * 2.0 * M_PI) { u = next; break; }
            u = next;
        }
        return u;
    }

    double total_length() const { return total_; }
    double error_estimate() const { return error_estimate_; }
    const std::vector<double>& knots_u() const { return knots_u_; }
    const std::vector<double>& knots_s() const { return knots_s_; }

private:
    std::size_t panel_of(double u) const {
        auto it = std::upper_bound(knots_u_.begin(), knots_u_.end(), u);
        if (it == knots_u_.begin()) return 0;
        return std::min<std::size_t>(static_cast<std::size_t>(it - knots_u_.begin()) - 1,
                                     knots_u_.size() - 2);
    }

    std::function<double(double)> speed_;
    std::vector<double> knots_u_, knots_s_;
    double total_ = 0.0;
    double error_estimate_ = 0.0;
    MonotoneCubic forward_, inverse_;
};

namespace detail {

/// Maximal u-intervals where kappa(u) < tol on an n-point scan, boundaries
/// refined by bisection, reported as s-intervals (wrap as two pieces).
template <class Curve>
std::vector<ArcInterval> intervals_below_kappa(const Curve& c, double tol, int n) {
    if (!(tol > 0.0)) return {};
    std::vector<bool> below(n);
    bool any = false;
    for (int i = 0; i < n; ++i) {
        below[i] = c.curvature(2.0 * M_PI * i / n) < tol;
        any = any || below[i];
    }
    if (!any) return {};
    auto bisect = [&](double lo, double hi) {
        double flo = c.curvature(lo) - tol;
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double fm = c.curvature(mid) - tol;
            if (flo * fm <= 0.0) hi = mid; else { lo = mid; flo = fm; }
        }
        return 0.5 * (lo + hi);
    };
    std::vector<ArcInterval> out;
    int i = 0;
    while (i < n) {
        if (!below[i]) { ++i; continue; }
        int j = i;
        while (j < n && below[j]) ++j;
        double sa = 0.0;
        if (i > 0) sa = c.s_from_u(bisect(2.0 * M_PI * (i - 1) / n, 2.0 * M_PI * i / n));
        double sb = c.total_length();
        if (j < n) sb = c.s_from_u(bisect(2.0 * M_PI * (j - 1) / n, 2.0 * M_PI * j / n));
        out.push_back({sa, sb});
        i = j;
    }
    return out;
}

} // namespace detail

/// Natural parameter along the evolute, accumulated from the first cusp
/// (extremum of R(s)) with segment boundaries at every cusp. Flex intervals
/// are masked and contribute zero length; a curve with no R-extrema (a
/// circle) has a point evolute, reported degenerate with ell identically 0.
struct EvoluteParam {
    bool degenerate = false;
    std::vector<double> cusp_s;           ///< cusp locations, ascending in u order
    std::vector<double> cusp_u;
    double ell_total = 0.0;
    std::vector<ArcInterval> masked;      ///< flex intervals excluded from the arc
    std::vector<ArcInterval> zero_length; ///< degenerate pieces (R locally constant)
    std::vector<double> break_v;          ///< breakpoints in v = u - u0 (wrapped)
    std::vector<double> cum_ell;          ///< cumulative arc at each breakpoint
    double u0 = 0.0;                      ///< first cusp, origin of ell
};

class ClosedCurve;
CurveFrame frame_at(const ClosedCurve& c, double s);

struct CurveOptions {
    int arc_panels = 256;
    int scan_grid = 4096;   ///< dense grid for regularity and extrema scans
    double kappa_tol = 0.0; ///< flex threshold [1/length]; 0 disables masking
};

/// Smooth closed 3D curve in truncated Fourier representation. Immutable
/// after construction; all queries are pure and thread-safe.
class ClosedCurve {
public:
    using Options = CurveOptions;

    ClosedCurve(FourierSeries x, FourierSeries y, FourierSeries z, Options opt = {})
        : fx_(std::move(x)), fy_(std::move(y)), fz_(std::move(z)), opt_(opt) {
        validate_regularity();
        arc_.emplace(make_speed(), opt_.arc_panels);
        build_evolute_param();
    }

    /// d-th derivative of r with respect to the angle u.
    Vec3 derivative(double u, int d) const {
        return {fx_.eval(u, d), fy_.eval(u, d), fz_.eval(u, d)};
    }
    Vec3 position(double u) const { return derivative(u, 0); }

    struct ArcDerivatives {
        Vec3 r1; ///< dr/ds (unit tangent)
        Vec3 r2; ///< d^2 r/ds^2 (curvature vector)
        Vec3 r3; ///< d^3 r/ds^3
    };

    /// Derivatives with respect to arc length, by the exact chain rule.
    ArcDerivatives arc_derivatives(double u) const {
        const Vec3 a = derivative(u, 1), b = derivative(u, 2), c = derivative(u, 3);
        const double g2 = dot(a, a);
        const double g = std::sqrt(g2);
        const double ab = dot(a, b);
        ArcDerivatives d;
        d.r1 = a / g;
        d.r2 = b / g2 - a * (ab / (g2 * g2));
        const double g3 = g2 * g;
        const double g5 = g2 * g3;
        d.r3 = c / g3 - b * (3.0 * ab / g5) - a * ((dot(b, b) + dot(a, c)) / g5) +
               a * (4.0 * ab * ab / (g5 * g2));
        return d;
    }

    double curvature(double u) const { return norm(arc_derivatives(u).r2); }

    /// dR/ds where R = 1/kappa; from kappa' = (r'' . r''') / kappa.
    double radius_derivative(double u) const {
        const ArcDerivatives d = arc_derivatives(u);
        const double kappa = norm(d.r2);
        return -dot(d.r2, d.r3) / (kappa * kappa * kappa);
    }

    Vec3 evolute_point(double u) const {
        const ArcDerivatives d = arc_derivatives(u);
        return position(u) + d.r2 / dot(d.r2, d.r2);
    }

    /// dq/ds of the evolute: r' + 2 R R' r'' + R^2 r'''.
    Vec3 evolute_velocity(double u) const {
        const ArcDerivatives d = arc_derivatives(u);
        const double kappa = norm(d.r2);
        const double R = 1.0 / kappa;
        const double Rp = -dot(d.r2, d.r3) / (kappa * kappa * kappa);
        return d.r1 + d.r2 * (2.0 * R * Rp) + d.r3 * (R * R);
    }

    double total_length() const { return arc_->total_length(); }
    double s_from_u(double u) const { return arc_->s_at(u); }
    double u_from_s(double s) const { return arc_->u_at(wrap_s(s)); }
    const ArcLengthMap& arc_map() const { return *arc_; }
    const EvoluteParam& evolute_param() const { return evo_; }
    double kappa_tol() const { return opt_.kappa_tol; }
    const Options& options() const { return opt_; }

    /// Natural parameter along the evolute at arc length s.
    double ell_at(double s) const {
        if (evo_.degenerate) return 0.0;
        const double u = u_from_s(s);
        double v = u - evo_.u0;
        v -= 2.0 * M_PI * std::floor(v / (2.0 * M_PI));
        auto it = std::upper_bound(evo_.break_v.begin(), evo_.break_v.end(), v);
        std::size_t i = (it == evo_.break_v.begin())
                            ? 0
                            : static_cast<std::size_t>(it - evo_.break_v.begin()) - 1;
        i = std::min(i, evo_.break_v.size() - 2);
        return evo_.cum_ell[i] +
               gauss16([this](double vv) { return masked_evolute_speed_v(vv); },
                       evo_.break_v[i], v);
    }

    double wrap_s(double s) const {
        const double S = total_length();
        s = std::fmod(s, S);
        return s < 0.0 ? s + S : s;
    }

    CurveFrame frame(double s) const { return frame_at(*this, s); }

private:
    std::function<double(double)> make_speed() const {
        // value captures keep the map valid across copies of the curve
        return [fx = fx_, fy = fy_, fz = fz_](double u) {
            const double dx = fx.eval(u, 1), dy = fy.eval(u, 1), dz = fz.eval(u, 1);
            return std::sqrt(dx * dx + dy * dy + dz * dz);
        };
    }

    bool masked_at(double u) const {
        return opt_.kappa_tol > 0.0 && curvature(u) < opt_.kappa_tol;
    }

    // |dq/du| at v relative to the cusp origin, zero inside flex masks.
    double masked_evolute_speed_v(double v) const {
        const double u = evo_.u0 + v;
        if (masked_at(u)) return 0.0;
        return norm(evolute_velocity(u)) * norm(derivative(u, 1));
    }

    void validate_regularity() const {
        const int n = opt_.scan_grid;
        std::vector<double> speeds(n);
        double vmax = 0.0;
        for (int i = 0; i < n; ++i) {
            speeds[i] = norm(derivative(2.0 * M_PI * i / n, 1));
            vmax = std::max(vmax, speeds[i]);
        }
        for (int i = 0; i < n; ++i)
            if (!(speeds[i] > 1e-9 * vmax))
                throw GeometryError("curve is not regular: |dr/du| vanishes near u = " +
                                    std::to_string(2.0 * M_PI * i / n));
    }

    void build_evolute_param() {
        const int n = opt_.scan_grid;
        const double S = total_length();
        std::vector<double> rp(n);
        std::vector<bool> masked(n);
        double rp_max = 0.0;
        for (int i = 0; i < n; ++i) {
            const double u = 2.0 * M_PI * i / n;
            masked[i] = masked_at(u);
            rp[i] = masked[i] ? 0.0 : radius_derivative(u);
            if (!masked[i]) rp_max = std::max(rp_max, std::abs(rp[i]));
        }
        if (rp_max < 1e-9) {
            // R(s) constant to tolerance: point evolute
            evo_.degenerate = true;
            evo_.zero_length.push_back({0.0, S});
            return;
        }
        const double flat_tol = 1e-12 * rp_max;
        auto sgn = [&](double v) { return v > flat_tol ? 1 : (v < -flat_tol ? -1 : 0); };
        // Walk consecutive samples with a definite sign of dR/ds; a flip
        // between them brackets a cusp. Short gaps of zeros are refined by
        // bisection (the series is periodic in u, so coordinates past 2 pi
        // are fine); long flat stretches collapse to their midpoint.
        std::vector<double> cusps_u;
        int i = 0;
        while (i < n && (masked[i] || sgn(rp[i]) == 0)) ++i;
        if (i < n) {
            int cur = i;
            while (cur < i + n) {
                int k = cur + 1;
                while (k <= i + n && (masked[k % n] || sgn(rp[k % n]) == 0)) ++k;
                if (k > i + n) break;
                const int s_cur = sgn(rp[cur % n]);
                const int s_next = sgn(rp[k % n]);
                if (s_cur != s_next) {
                    const double ua = 2.0 * M_PI * cur / n;
                    const double ub = 2.0 * M_PI * k / n;
                    double cusp = (k - cur > 3) ? 0.5 * (ua + ub)
                                                : bisect_radius_derivative(ua, ub);
                    cusp = std::fmod(cusp, 2.0 * M_PI);
                    if (cusp < 0.0) cusp += 2.0 * M_PI;
                    cusps_u.push_back(cusp);
                }
                cur = k;
            }
        }
        std::sort(cusps_u.begin(), cusps_u.end());
        cusps_u.erase(std::unique(cusps_u.begin(), cusps_u.end(),
                                  [](double a, double b) { return std::abs(a - b) < 1e-10; }),
                      cusps_u.end());
        if (cusps_u.empty()) {
            evo_.degenerate = true;
            return;
        }
        evo_.u0 = cusps_u.front();
        for (double cu : cusps_u) {
            evo_.cusp_u.push_back(cu);
            evo_.cusp_s.push_back(s_from_u(cu));
        }
        evo_.masked = detail::intervals_below_kappa(*this, opt_.kappa_tol, n);

        std::vector<double> breaks{0.0, 2.0 * M_PI};
        auto push_v = [&](double u) {
            double v = u - evo_.u0;
            v -= 2.0 * M_PI * std::floor(v / (2.0 * M_PI));
            if (v > 1e-13 && v < 2.0 * M_PI - 1e-13) breaks.push_back(v);
        };
        for (double cu : cusps_u) push_v(cu);
        for (const auto& iv : evo_.masked) {
            push_v(u_from_s(iv.begin));
            push_v(u_from_s(iv.end));
        }
        const int fill = 512;
        for (int k = 1; k < fill; ++k) breaks.push_back(2.0 * M_PI * k / fill);
        std::sort(breaks.begin(), breaks.end());
        breaks.erase(std::unique(breaks.begin(), breaks.end(),
                                 [](double a, double b) { return b - a < 1e-13; }),
                     breaks.end());
        evo_.break_v = breaks;
        evo_.cum_ell.assign(breaks.size(), 0.0);
        for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
            const double piece =
                gauss16([this](double vv) { return masked_evolute_speed_v(vv); },
                        breaks[k], breaks[k + 1]);
            evo_.cum_ell[k + 1] = evo_.cum_ell[k] + piece;
            const double vm = 0.5 * (breaks[k] + breaks[k + 1]);
            if (piece < 1e-14 * S && !masked_at(evo_.u0 + vm)) {
                double ua = std::fmod(evo_.u0 + breaks[k], 2.0 * M_PI);
                double ub = std::fmod(evo_.u0 + breaks[k + 1], 2.0 * M_PI);
                evo_.zero_length.push_back({s_from_u(ua), s_from_u(ub)});
            }
        }
        evo_.ell_total = evo_.cum_ell.back();
    }

    double bisect_radius_derivative(double lo, double hi) const {
        double flo = radius_derivative(lo);
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double fm = radius_derivative(mid);
            if (flo * fm <= 0.0) hi = mid; else { lo = mid; flo = fm; }
        }
        return 0.5 * (lo + hi);
    }

    FourierSeries fx_, fy_, fz_;
    Options opt_;
    std::optional<ArcLengthMap> arc_;
    EvoluteParam evo_;
};

/// Full geometric frame at arc length s (s is interpreted modulo the total
/// length). Flex points get a tagged frame with no evolute data.
inline CurveFrame frame_at(const ClosedCurve& c, double s) {
    CurveFrame f;
    f.s = c.wrap_s(s);
    const double u = c.u_from_s(f.s);
    const auto d = c.arc_derivatives(u);
    f.r = c.position(u);
    f.t_hat = d.r1;
    f.kappa = norm(d.r2);
    f.flex = c.kappa_tol() > 0.0 ? (f.kappa < c.kappa_tol()) : (f.kappa == 0.0);
    if (!f.flex) {
        f.radius = 1.0 / f.kappa;
        f.b_hat = normalized(cross(d.r1, d.r2));
        f.evolute = f.r + d.r2 * (f.radius * f.radius);
        f.ell = c.ell_at(f.s);
    }
    return f;
}

/// Monotone u <-> s map with n_samples quadrature panels.
inline ArcLengthMap reparametrize_arclength(const ClosedCurve& c, int n_samples) {
    return ArcLengthMap(
        [fx = c.derivative(0, 0), &c](double u) { return norm(c.derivative(u, 1)); },
        n_samples);
}

/// Piecewise natural parameter of the evolute (precomputed on the curve).
inline const EvoluteParam& evolute_parameter(const ClosedCurve& c) {
    return c.evolute_param();
}

/// Maximal arc-length intervals where the curvature is below kappa_tol;
/// empty for strictly convex curves and for kappa_tol = 0.
inline std::vector<ArcInterval> find_flex_points(const ClosedCurve& c, double kappa_tol) {
    return detail::intervals_below_kappa(c, kappa_tol, 4096);
}

/// Convenience constructors for common shapes.
inline ClosedCurve make_circle(double radius, Vec3 center = {},
                               ClosedCurve::Options opt = {}) {
    FourierSeries x{{center.x, radius}, {0.0, 0.0}};
    FourierSeries y{{center.y, 0.0}, {0.0, radius}};
    FourierSeries z{{center.z}, {0.0}};
    return ClosedCurve(std::move(x), std::move(y), std::move(z), opt);
}

inline ClosedCurve make_ellipse(double a, double b, ClosedCurve::Options opt = {}) {
    FourierSeries x{{0.0, a}, {0.0, 0.0}};
    FourierSeries y{{0.0, 0.0}, {0.0, b}};
    FourierSeries z{{0.0}, {0.0}};
    return ClosedCurve(std::move(x), std::move(y), std::move(z), opt);
}

} // namespace vortex
