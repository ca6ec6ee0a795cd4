// Test-side numerical oracles, independent of the library's own integration
// and solver code paths.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace oracles {

// recursive adaptive Simpson (distinct from the library's doubling scheme)
inline double adaptive_simpson_rec(const std::function<double(double)>& f,
                                   double a, double b, double fa, double fm,
                                   double fb, double whole, double tol,
                                   int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double quad(const std::function<double(double)>& f, double a, double b,
                   double tol = 1e-12) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

// integral over (0, inf) with the upper cutoff grown until the tail of the
// weight exp(-decay*x) is below 1e-12 mass
inline double quad_halfline(const std::function<double(double)>& f,
                            double decay, double tol = 1e-12) {
    double xmax = 1.0;
    while (std::exp(-decay * xmax) > 1e-14) xmax *= 2.0;
    return quad(f, 1e-300, xmax, tol);
}

// fixed-step classic RK4 for scalar autonomous ODEs
inline double rk4_solve(const std::function<double(double)>& rhs, double y0,
                        double t_end, double h) {
    double y = y0;
    double t = 0.0;
    while (t < t_end - 1e-15) {
        const double step = std::min(h, t_end - t);
        const double k1 = rhs(y);
        const double k2 = rhs(y + 0.5 * step * k1);
        const double k3 = rhs(y + 0.5 * step * k2);
        const double k4 = rhs(y + step * k3);
        y += step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += step;
    }
    return y;
}

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
};

inline MeanStderr mean_stderr(const std::vector<double>& xs) {
    const auto n = static_cast<double>(xs.size());
    double s = 0.0;
    for (double x : xs) s += x;
    const double mean = s / n;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace oracles
