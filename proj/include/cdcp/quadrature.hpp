#pragma once

#include <cmath>
#include <cstddef>

#include "cdcp/errors.hpp"

namespace cdcp {

template <typename F>
double composite_simpson(F&& f, double a, double b, std::size_t n) {
    // n = number of subintervals, must be even and >= 2
    if (n % 2) ++n;
    const double h = (b - a) / static_cast<double>(n);
    double s = f(a) + f(b);
    for (std::size_t i = 1; i < n; ++i) {
        s += f(a + h * static_cast<double>(i)) * ((i % 2) ? 4.0 : 2.0);
    }
    return s * h / 3.0;
}

// Composite Simpson with Richardson-style refinement: double the panel count
// until two successive estimates agree to rel_tol.
template <typename F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-8,
                 std::size_t n0 = 64, std::size_t n_max = (1u << 22)) {
    if (a == b) return 0.0;
    double prev = composite_simpson(f, a, b, n0);
    for (std::size_t n = n0 * 2; n <= n_max; n *= 2) {
        double cur = composite_simpson(f, a, b, n);
        if (std::abs(cur - prev) <= rel_tol * std::abs(cur) + 1e-300) return cur;
        prev = cur;
    }
    fail(ErrorCode::QuadratureNotConverged,
         "Simpson refinement stalled on [" + std::to_string(a) + ", " +
             std::to_string(b) + "]");
}

}  // namespace cdcp
