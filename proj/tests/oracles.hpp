#pragma once
// Reference computations that do not touch the library's closed forms.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

using Fn = std::function<double(double)>;

inline double simpson(double a, double fa, double b, double fb, double fm)
{
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive(const Fn& f, double a, double fa, double b, double fb, double m, double fm, double whole,
                       double tol, int depth)
{
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(a, fa, m, fm, flm);
    const double right = simpson(m, fm, b, fb, frm);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adaptive(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

/// Adaptive Simpson quadrature with Richardson correction.
inline double integrate(const Fn& f, double a, double b, double tol = 1e-14)
{
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    return adaptive(f, a, fa, b, fb, m, fm, simpson(a, fa, b, fb, fm), tol, 50);
}

/// Coverage cost sum_i int_{cell i} 1/2 f((p_i - x)^2) phi(x) dx by quadrature.
inline double objective(const Fn& phi, const Fn& f, double A, double B, const std::vector<double>& p)
{
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double lo = i == 0 ? A : 0.5 * (p[i - 1] + p[i]);
        const double hi = i + 1 == p.size() ? B : 0.5 * (p[i] + p[i + 1]);
        const double q = p[i];
        auto g = [&](double x) { return 0.5 * f((q - x) * (q - x)) * phi(x); };
        // Split at p_i where the integrand's smoothness may change.
        if (q > lo && q < hi)
            total += integrate(g, lo, q) + integrate(g, q, hi);
        else
            total += integrate(g, lo, hi);
    }
    return total;
}

/// Central differences of a scalar function of a vector.
inline std::vector<double> gradient_fd(const std::function<double(const std::vector<double>&)>& fn,
                                       std::vector<double> x, double h)
{
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double x0 = x[i];
        x[i] = x0 + h;
        const double up = fn(x);
        x[i] = x0 - h;
        const double down = fn(x);
        x[i] = x0;
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

/// Exhaustive minimum over strictly increasing index triples/tuples of A + k h.
inline std::vector<double> grid_argmin(const std::function<double(const std::vector<double>&)>& fn, double A,
                                       double B, int m, int cells)
{
    const double h = (B - A) / cells;
    std::vector<int> idx(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) idx[static_cast<std::size_t>(i)] = i;
    std::vector<double> best;
    double best_value = INFINITY;
    for (;;) {
        std::vector<double> p;
        for (int k : idx) p.push_back(A + h * k);
        const double v = fn(p);
        if (v < best_value) {
            best_value = v;
            best = p;
        }
        int j = m - 1;
        while (j >= 0 && idx[static_cast<std::size_t>(j)] == cells - (m - 1 - j)) --j;
        if (j < 0) break;
        ++idx[static_cast<std::size_t>(j)];
        for (int k = j + 1; k < m; ++k) idx[static_cast<std::size_t>(k)] = idx[static_cast<std::size_t>(k - 1)] + 1;
    }
    return best;
}

} // namespace oracle
