#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "vortex/errors.hpp"

namespace vortex {

/// Gauss-Legendre nodes and weights on [-1, 1], computed once by Newton
/// iteration on the Legendre recurrence.
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    explicit GaussLegendreRule(int n) : nodes(n), weights(n) {
        for (int i = 0; i < n; ++i) {
            // Tricomi initial guess, then Newton on P_n.
            double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                pp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / pp;
                x -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        }
    }
};

namespace detail {

inline const GaussLegendreRule& gl16() {
    static const GaussLegendreRule rule(16);
    return rule;
}

} // namespace detail

/// Fixed 16-point Gauss-Legendre quadrature over [a, b].
template <class F>
double gauss16(F&& f, double a, double b) {
    const auto& rule = detail::gl16();
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return acc * half;
}

namespace detail {

// Gauss(7)-Kronrod(15) pair, QUADPACK constants.
inline constexpr std::array<double, 8> kXgk = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691, 0.7415311855993944,
    0.5860872354676911, 0.4058451513773972, 0.2077849550078985, 0.0};
inline constexpr std::array<double, 8> kWgk = {
    0.0229353220105292, 0.0630920926299786, 0.1047900103222502, 0.1406532597155259,
    0.1690047266392679, 0.1903505780647854, 0.2044329400752989, 0.2094821410847278};
inline constexpr std::array<double, 4> kWg = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189, 0.4179591836734694};

template <class F>
void gk15(F&& f, double a, double b, double& kronrod, double& err) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    const double fc = f(mid);
    double resk = kWgk[7] * fc;
    double resg = kWg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double fsum = f(mid - dx) + f(mid + dx);
        resk += kWgk[j] * fsum;
        if (j % 2 == 1) resg += kWg[j / 2] * fsum;
    }
    kronrod = resk * half;
    err = std::abs((resk - resg) * half);
}

template <class F>
double adaptive_gk(F&& f, double a, double b, double rel_tol, double abs_floor, int depth) {
    double val = 0.0, err = 0.0;
    gk15(f, a, b, val, err);
    const double tol = std::max(abs_floor, rel_tol * std::abs(val));
    if (err <= tol || depth >= 52) {
        if (depth >= 52 && err > tol && err > 1e3 * tol)
            throw NumericalError("adaptive quadrature failed to converge");
        return val;
    }
    const double mid = 0.5 * (a + b);
    return adaptive_gk(f, a, mid, rel_tol, 0.5 * abs_floor, depth + 1) +
           adaptive_gk(f, mid, b, rel_tol, 0.5 * abs_floor, depth + 1);
}

} // namespace detail

/// Adaptive Gauss-Kronrod integration of f over [a, b] to the given relative
/// tolerance (plus a small absolute floor to terminate on integrals near zero).
template <class F>
double integrate_adaptive(F&& f, double a, double b, double rel_tol = 1e-10,
                          double abs_floor = 0.0) {
    if (a == b) return 0.0;
    if (abs_floor == 0.0) {
        double v0 = 0.0, e0 = 0.0;
        detail::gk15(f, a, b, v0, e0);
        abs_floor = 1e-300 + 1e-15 * std::abs(v0);
    }
    return detail::adaptive_gk(f, a, b, rel_tol, abs_floor, 0);
}

/// Rectangle (= trapezoid) rule for a periodic integrand sampled on a uniform
/// grid covering one full period; spectrally accurate for smooth data.
inline double periodic_rectangle_sum(const std::vector<double>& values, double period) {
    if (values.empty()) return 0.0;
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc * period / static_cast<double>(values.size());
}

} // namespace vortex
