#ifndef NLSPECT_QUADRATURE_HPP
#define NLSPECT_QUADRATURE_HPP

#include <cmath>
#include <vector>

namespace nlspect {

/// Adaptive Simpson integration on [a, b].
template <typename Func>
double adaptive_simpson(Func&& f, double a, double b, double tol = 1e-12,
                        int max_depth = 40) {
    struct Impl {
        Func& f;
        int max_depth;
        double recurse(double a, double b, double fa, double fm, double fb,
                       double whole, double tol, int depth) {
            const double m = 0.5 * (a + b);
            const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
            const double flm = f(lm), frm = f(rm);
            const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            const double delta = left + right - whole;
            if (depth >= max_depth || std::abs(delta) <= 15.0 * tol)
                return left + right + delta / 15.0;
            return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
                   recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
        }
    };
    if (a == b) return 0.0;
    Impl impl{f, max_depth};
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return impl.recurse(a, b, fa, fm, fb, whole, tol, 0);
}

/// Composite Simpson over uniformly spaced samples (trapezoid on a trailing
/// odd interval).
inline double simpson_uniform(const std::vector<double>& y, double h) {
    const std::size_t n = y.size();
    if (n < 2) return 0.0;
    std::size_t m = n - 1;  // interval count
    double sum = 0.0;
    std::size_t pairs = m / 2;
    for (std::size_t k = 0; k < pairs; ++k)
        sum += h / 3.0 * (y[2 * k] + 4.0 * y[2 * k + 1] + y[2 * k + 2]);
    if (m % 2 == 1) sum += 0.5 * h * (y[n - 2] + y[n - 1]);
    return sum;
}

}  // namespace nlspect

#endif
