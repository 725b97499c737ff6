#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "vortex/errors.hpp"

namespace vortex {

/// Monotone cubic Hermite interpolant (Fritsch-Carlson slope limiting).
/// Shape-preserving: strictly increasing data yields a strictly increasing
/// interpolant, which is what the arc-length table needs.
class MonotoneCubic {
public:
    MonotoneCubic() = default;

    MonotoneCubic(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n)
            throw ValidationError("MonotoneCubic: need at least two matching samples");
        slopes_.resize(n);
        std::vector<double> d(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double h = x_[i + 1] - x_[i];
            if (h <= 0.0) throw ValidationError("MonotoneCubic: abscissae must increase");
            d[i] = (y_[i + 1] - y_[i]) / h;
        }
        slopes_[0] = d[0];
        slopes_[n - 1] = d[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i)
            slopes_[i] = (d[i - 1] * d[i] <= 0.0) ? 0.0 : 0.5 * (d[i - 1] + d[i]);
        // Fritsch-Carlson limiter.
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (d[i] == 0.0) {
                slopes_[i] = slopes_[i + 1] = 0.0;
                continue;
            }
            const double a = slopes_[i] / d[i];
            const double b = slopes_[i + 1] / d[i];
            const double r2 = a * a + b * b;
            if (r2 > 9.0) {
                const double t = 3.0 / std::sqrt(r2);
                slopes_[i] = t * a * d[i];
                slopes_[i + 1] = t * b * d[i];
            }
        }
    }

    double operator()(double x) const {
        const std::size_t i = locate(x);
        const double h = x_[i + 1] - x_[i];
        const double t = (x - x_[i]) / h;
        const double t2 = t * t, t3 = t2 * t;
        const double h00 = 2 * t3 - 3 * t2 + 1;
        const double h10 = t3 - 2 * t2 + t;
        const double h01 = -2 * t3 + 3 * t2;
        const double h11 = t3 - t2;
        return h00 * y_[i] + h10 * h * slopes_[i] + h01 * y_[i + 1] + h11 * h * slopes_[i + 1];
    }

    double front_x() const { return x_.front(); }
    double back_x() const { return x_.back(); }

private:
    std::size_t locate(double x) const {
        if (x <= x_.front()) return 0;
        if (x >= x_.back()) return x_.size() - 2;
        auto it = std::upper_bound(x_.begin(), x_.end(), x);
        return static_cast<std::size_t>(it - x_.begin()) - 1;
    }

    std::vector<double> x_, y_, slopes_;
};

} // namespace vortex
