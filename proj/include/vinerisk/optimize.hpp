#pragma once

#include <cmath>
#include <limits>

namespace vinerisk {

// Brent's parabolic/golden minimizer on [a, b], started at x0 instead of the
// golden point so a tau-inversion seed is honored.  NaN objective values are
// treated as +inf.  Returns the argmin; *fmin receives the objective there.
template <typename F>
double brent_min(F&& f, double a, double b, double x0, double tol, int maxit,
                 double* fmin = nullptr) {
    auto safe = [&](double t) {
        double val = f(t);
        return std::isnan(val) ? std::numeric_limits<double>::infinity() : val;
    };
    const double golden = 0.3819660112501051;
    const double eps = std::sqrt(std::numeric_limits<double>::epsilon());

    double x = std::min(std::max(x0, a), b);
    double w = x, v = x;
    double fx = safe(x), fw = fx, fv = fx;
    double d = 0.0, e = 0.0;

    for (int iter = 0; iter < maxit; ++iter) {
        double m = 0.5 * (a + b);
        double tol1 = eps * std::abs(x) + tol;
        double tol2 = 2.0 * tol1;
        if (std::abs(x - m) <= tol2 - 0.5 * (b - a)) break;

        bool use_golden = true;
        if (std::abs(e) > tol1) {
            // parabolic fit through x, v, w
            double r = (x - w) * (fx - fv);
            double q = (x - v) * (fx - fw);
            double p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if (q > 0.0) p = -p;
            q = std::abs(q);
            double e_old = e;
            e = d;
            if (std::abs(p) < std::abs(0.5 * q * e_old) && p > q * (a - x) &&
                p < q * (b - x)) {
                d = p / q;
                double u = x + d;
                if (u - a < tol2 || b - u < tol2) d = (x < m) ? tol1 : -tol1;
                use_golden = false;
            }
        }
        if (use_golden) {
            e = (x < m) ? b - x : a - x;
            d = golden * e;
        }

        double u = (std::abs(d) >= tol1) ? x + d : x + ((d > 0.0) ? tol1 : -tol1);
        double fu = safe(u);
        if (fu <= fx) {
            if (u < x) b = x; else a = x;
            v = w; fv = fw;
            w = x; fw = fx;
            x = u; fx = fu;
        } else {
            if (u < x) a = u; else b = u;
            if (fu <= fw || w == x) {
                v = w; fv = fw;
                w = u; fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u; fv = fu;
            }
        }
    }
    if (fmin) *fmin = fx;
    return x;
}

// Bisection for a monotone increasing g on [a, b]; assumes a bracket.
template <typename G>
double bisect_increasing(G&& g, double a, double b, double target, double tol,
                         int maxit = 200) {
    double fa = g(a) - target;
    if (fa >= 0.0) return a;
    if (g(b) - target <= 0.0) return b;
    for (int i = 0; i < maxit && b - a > tol; ++i) {
        double m = 0.5 * (a + b);
        if (g(m) - target < 0.0) a = m; else b = m;
    }
    return 0.5 * (a + b);
}

} // namespace vinerisk
