#include "vinerisk/copula.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vinerisk/dependence.hpp"
#include "vinerisk/errors.hpp"
#include "vinerisk/normal.hpp"
#include "vinerisk/optimize.hpp"
#include "vinerisk/quadrature.hpp"
#include "vinerisk/rng.hpp"

namespace vinerisk {

namespace {

constexpr double kEps = 1e-10; // working interval is [kEps, 1 - kEps]
constexpr double kPi = 3.1415926535897932384626433832795;

double clamp01(double x, double lo, double hi) {
    return std::min(hi, std::max(lo, x));
}

// ---------------------------------------------------------------------------
// base (rotation 0) primitives; all families here are exchangeable, so one
// h function h(free | cond) serves both coordinates
// ---------------------------------------------------------------------------

// Clayton: log of A = u^-t + v^-t - 1, stable for extreme t * log u
double clayton_lnA(double t, double lnu, double lnv) {
    double a = -t * lnu, b = -t * lnv; // both >= 0
    if (std::max(a, b) < 30.0) return std::log1p(std::expm1(a) + std::expm1(b));
    double m = std::max(a, b), mn = std::min(a, b);
    return m + std::log1p(std::exp(mn - m) - std::exp(-m));
}

double clayton_cdf(double t, double u, double v) {
    return std::exp(-clayton_lnA(t, std::log(u), std::log(v)) / t);
}

double clayton_log_pdf(double t, double u, double v) {
    double lnu = std::log(u), lnv = std::log(v);
    double lnA = clayton_lnA(t, lnu, lnv);
    return std::log1p(t) - (t + 1.0) * (lnu + lnv) - (2.0 + 1.0 / t) * lnA;
}

double clayton_h(double t, double free, double cond) {
    double lnf = std::log(free), lnc = std::log(cond);
    double lnA = clayton_lnA(t, lnf, lnc);
    return std::exp(-(t + 1.0) * lnc - (1.0 + 1.0 / t) * lnA);
}

double clayton_hinv(double t, double w, double cond) {
    // invert w = c^-(t+1) * A^-(1+1/t) in closed form
    double lnc = std::log(cond);
    double e1 = -t / (t + 1.0) * std::log(w);
    double lt = std::log(std::expm1(e1));
    double expo = -t * lnc + lt;
    double term = (expo > 700.0) ? std::numeric_limits<double>::infinity()
                                 : std::exp(expo);
    return std::exp(-std::log1p(term) / t);
}

// Gumbel: s = (x^t + y^t)^(1/t) with x = -log u, via logs
double gumbel_ls(double t, double lx, double ly) {
    double a = t * lx, b = t * ly;
    double m = std::max(a, b);
    return (m + std::log1p(std::exp(std::min(a, b) - m))) / t;
}

double gumbel_cdf(double t, double u, double v) {
    double lx = std::log(-std::log(u)), ly = std::log(-std::log(v));
    return std::exp(-std::exp(gumbel_ls(t, lx, ly)));
}

double gumbel_log_pdf(double t, double u, double v) {
    double tx = -std::log(u), ty = -std::log(v);
    double lx = std::log(tx), ly = std::log(ty);
    double ls = gumbel_ls(t, lx, ly);
    double s = std::exp(ls);
    return -s + tx + ty + (t - 1.0) * (lx + ly) + (1.0 - 2.0 * t) * ls +
           std::log(s + t - 1.0);
}

double gumbel_h(double t, double free, double cond) {
    double tf = -std::log(free), tc = -std::log(cond);
    double lf = std::log(tf), lc = std::log(tc);
    double ls = gumbel_ls(t, lf, lc);
    return std::exp(-std::exp(ls) + tc + (t - 1.0) * lc + (1.0 - t) * ls);
}

// Frank: g(z) = exp(-t z) - 1.  The naive g1 + g(u) g(v) cancels badly for
// large |t|; this same-sign grouping of the four exponentials does not.
double frank_d(double t, double u, double v) {
    return std::exp(-t * u) * std::expm1(-t * (1.0 - u)) +
           std::exp(-t * v) * std::expm1(-t * u);
}

double frank_cdf(double t, double u, double v) {
    double g1 = std::expm1(-t);
    return -std::log(frank_d(t, u, v) / g1) / t;
}

double frank_log_pdf(double t, double u, double v) {
    if (std::abs(t) < 1e-12) return 0.0;
    double g1 = std::expm1(-t);
    return std::log(-t * g1) - t * (u + v) -
           2.0 * std::log(std::abs(frank_d(t, u, v)));
}

double frank_h(double t, double free, double cond) {
    double gf = std::expm1(-t * free);
    return std::exp(-t * cond) * gf / frank_d(t, free, cond);
}

double frank_hinv(double t, double w, double cond) {
    double g1 = std::expm1(-t);
    double denom = std::exp(-t * cond) * (1.0 - w) + w; // e^-tc - w g(c)
    double gz = w * g1 / denom;
    return -std::log1p(gz) / t;
}

// Joe: A = x^t + y^t - x^t y^t with x = 1 - u; log A kept stable near the
// upper corner where both x^t terms underflow
double joe_lnA(double t, double lnx, double lny) {
    double a = t * lnx, b = t * lny; // both <= 0
    double m = std::max(a, b);
    double inner = std::log1p(std::exp(std::min(a, b) - m) * (-std::expm1(m)));
    return m + inner;
}

double joe_cdf(double t, double u, double v) {
    double lnA = joe_lnA(t, std::log1p(-u), std::log1p(-v));
    return -std::expm1(lnA / t);
}

double joe_log_pdf(double t, double u, double v) {
    double lnx = std::log1p(-u), lny = std::log1p(-v);
    double lnA = joe_lnA(t, lnx, lny);
    return (1.0 / t - 2.0) * lnA + (t - 1.0) * (lnx + lny) +
           std::log(t - 1.0 + std::exp(lnA));
}

double joe_h(double t, double free, double cond) {
    double lnxf = std::log1p(-free), lnyc = std::log1p(-cond);
    double lnA = joe_lnA(t, lnxf, lnyc);
    return std::exp((1.0 / t - 1.0) * lnA + (t - 1.0) * lnyc +
                    std::log(-std::expm1(t * lnxf)));
}

double gaussian_log_pdf(double r, double u, double v) {
    double x = norm_quantile(u), y = norm_quantile(v);
    double s2 = 1.0 - r * r;
    return -0.5 * std::log(s2) -
           (r * r * (x * x + y * y) - 2.0 * r * x * y) / (2.0 * s2);
}

double base_cdf(FamilyKind k, double t, double u, double v) {
    switch (k) {
        case FamilyKind::independence: return u * v;
        case FamilyKind::gaussian:
            return bvn_cdf(norm_quantile(u), norm_quantile(v), t);
        case FamilyKind::clayton: return clayton_cdf(t, u, v);
        case FamilyKind::gumbel: return gumbel_cdf(t, u, v);
        case FamilyKind::frank: return frank_cdf(t, u, v);
        case FamilyKind::joe: return joe_cdf(t, u, v);
    }
    return 0.0;
}

double base_log_pdf(FamilyKind k, double t, double u, double v) {
    switch (k) {
        case FamilyKind::independence: return 0.0;
        case FamilyKind::gaussian: return gaussian_log_pdf(t, u, v);
        case FamilyKind::clayton: return clayton_log_pdf(t, u, v);
        case FamilyKind::gumbel: return gumbel_log_pdf(t, u, v);
        case FamilyKind::frank: return frank_log_pdf(t, u, v);
        case FamilyKind::joe: return joe_log_pdf(t, u, v);
    }
    return 0.0;
}

double base_h(FamilyKind k, double t, double free, double cond) {
    switch (k) {
        case FamilyKind::independence: return free;
        case FamilyKind::gaussian:
            return norm_cdf((norm_quantile(free) - t * norm_quantile(cond)) /
                            std::sqrt(1.0 - t * t));
        case FamilyKind::clayton: return clayton_h(t, free, cond);
        case FamilyKind::gumbel: return gumbel_h(t, free, cond);
        case FamilyKind::frank: return frank_h(t, free, cond);
        case FamilyKind::joe: return joe_h(t, free, cond);
    }
    return free;
}

// bracketed Newton on the free coordinate; density is the derivative of h
double newton_hinv(FamilyKind k, double t, double w, double cond) {
    double lo = kEps, hi = 1.0 - kEps;
    double z = clamp01(w, lo, hi);
    for (int it = 0; it < 100; ++it) {
        double hz = base_h(k, t, z, cond);
        double err = hz - w;
        if (std::abs(err) < 1e-12 || hi - lo < 1e-15) break;
        if (err < 0.0) lo = z; else hi = z;
        double dens = std::exp(base_log_pdf(k, t, z, cond));
        double zn = (dens > 1e-100 && std::isfinite(dens)) ? z - err / dens : z;
        if (!(zn > lo && zn < hi)) zn = 0.5 * (lo + hi);
        z = zn;
    }
    return z;
}

double base_hinv(FamilyKind k, double t, double w, double cond) {
    switch (k) {
        case FamilyKind::independence: return w;
        case FamilyKind::gaussian:
            return norm_cdf(std::sqrt(1.0 - t * t) * norm_quantile(w) +
                            t * norm_quantile(cond));
        case FamilyKind::clayton: {
            double z = clayton_hinv(t, w, cond);
            if (std::isfinite(z)) return z;
            return newton_hinv(k, t, w, cond);
        }
        case FamilyKind::frank: {
            // closed form, plus Newton polish for the last couple of ulps
            double z = clamp01(frank_hinv(t, w, cond), kEps, 1.0 - kEps);
            for (int i = 0; i < 2; ++i) {
                double err = frank_h(t, z, cond) - w;
                double dens = std::exp(frank_log_pdf(t, z, cond));
                if (dens > 1e-100 && std::isfinite(dens))
                    z = clamp01(z - err / dens, kEps, 1.0 - kEps);
            }
            return z;
        }
        case FamilyKind::gumbel:
        case FamilyKind::joe: return newton_hinv(k, t, w, cond);
    }
    return w;
}

// ---------------------------------------------------------------------------
// Kendall tau maps
// ---------------------------------------------------------------------------

// Debye function D1 on (0, inf)
double debye1(double t) {
    double integral = gauss_integrate(
        [](double s) { return s / std::expm1(s); }, 0.0, t, 128);
    return integral / t;
}

double frank_tau(double t) {
    double a = std::abs(t);
    if (a < 1e-12) return 0.0;
    double tau = 1.0 - 4.0 / a * (1.0 - debye1(a));
    return t > 0.0 ? tau : -tau;
}

double joe_tau(double t) {
    // tau = 1 - 4 * sum_{k>=1} 1/(k (2 + k t) (2 + (k-1) t)); 300 explicit
    // terms plus a midpoint-rule tail from the partial-fraction antiderivative
    // keep the error near 1e-12 across the whole parameter interval
    const int kTerms = 300;
    double sum = 0.0;
    for (int k = 1; k <= kTerms; ++k) {
        double kd = k;
        sum += 1.0 / (kd * (2.0 + kd * t) * (2.0 + (kd - 1.0) * t));
    }
    const double m = kTerms + 0.5;
    double tail;
    if (std::abs(t - 2.0) < 1e-6) {
        // f(x) = 1/(4 x^2 (1 + x)) at t = 2
        tail = 1.0 / (4.0 * m) - 0.25 * std::log1p(1.0 / m);
    } else {
        double a = 1.0 / (2.0 * (2.0 - t));
        double b = 0.5;
        double c = 1.0 / (t - 2.0);
        double fm = a * std::log(m) + (b / t) * std::log(2.0 + m * t) +
                    (c / t) * std::log(2.0 + (m - 1.0) * t);
        double finf = ((b + c) / t) * std::log(t);
        tail = finf - fm;
    }
    double fv = 1.0 / (m * (2.0 + m * t) * (2.0 + (m - 1.0) * t));
    double dlog = 1.0 / m + t / (2.0 + m * t) + t / (2.0 + (m - 1.0) * t);
    tail += fv * dlog / 24.0; // -f'(m)/24 Euler-Maclaurin correction
    return 1.0 - 4.0 * (sum + tail);
}

double base_tau(FamilyKind k, double t) {
    switch (k) {
        case FamilyKind::independence: return 0.0;
        case FamilyKind::gaussian: return 2.0 / kPi * std::asin(t);
        case FamilyKind::clayton: return t / (t + 2.0);
        case FamilyKind::gumbel: return 1.0 - 1.0 / t;
        case FamilyKind::frank: return frank_tau(t);
        case FamilyKind::joe: return joe_tau(t);
    }
    return 0.0;
}

// inverse of base_tau, clamped to the admissible interval
double base_tau_inv_clamped(FamilyKind k, double tau) {
    ParamBounds b = param_bounds(k);
    switch (k) {
        case FamilyKind::independence: return 0.0;
        case FamilyKind::gaussian:
            return clamp01(std::sin(0.5 * kPi * tau), b.lo, b.hi);
        case FamilyKind::clayton:
            return clamp01(2.0 * tau / (1.0 - tau), b.lo, b.hi);
        case FamilyKind::gumbel:
            return clamp01(1.0 / (1.0 - tau), b.lo, b.hi);
        case FamilyKind::frank: {
            double a = std::abs(tau);
            double th = bisect_increasing(
                [](double t) { return frank_tau(t); }, 1e-4, b.hi, a, 1e-11);
            return tau >= 0.0 ? th : -th;
        }
        case FamilyKind::joe:
            return bisect_increasing([](double t) { return joe_tau(t); }, b.lo,
                                     b.hi, tau, 1e-11);
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// rotation layer
// ---------------------------------------------------------------------------

void check_point(double u, double v) {
    if (std::isnan(u) || std::isnan(v))
        throw param_error("copula evaluation at NaN coordinates");
}

} // namespace

double interior(double u) { return clamp01(u, kEps, 1.0 - kEps); }

double cop_cdf(FamilyId f, double t, double u, double v) {
    check_theta(f, t);
    check_point(u, v);
    u = interior(u);
    v = interior(v);
    double c;
    switch (f.rotation) {
        case 90: c = v - base_cdf(f.kind, t, 1.0 - u, v); break;
        case 180: c = u + v - 1.0 + base_cdf(f.kind, t, 1.0 - u, 1.0 - v); break;
        case 270: c = u - base_cdf(f.kind, t, u, 1.0 - v); break;
        default: c = base_cdf(f.kind, t, u, v); break;
    }
    return clamp01(c, 0.0, 1.0);
}

double cop_log_pdf(FamilyId f, double t, double u, double v) {
    check_theta(f, t);
    check_point(u, v);
    u = interior(u);
    v = interior(v);
    switch (f.rotation) {
        case 90: return base_log_pdf(f.kind, t, 1.0 - u, v);
        case 180: return base_log_pdf(f.kind, t, 1.0 - u, 1.0 - v);
        case 270: return base_log_pdf(f.kind, t, u, 1.0 - v);
        default: return base_log_pdf(f.kind, t, u, v);
    }
}

double cop_pdf(FamilyId f, double t, double u, double v) {
    return std::exp(cop_log_pdf(f, t, u, v));
}

double hfunc(FamilyId f, double t, double u, double v, Side which) {
    check_theta(f, t);
    check_point(u, v);
    u = interior(u);
    v = interior(v);
    double h;
    if (which == Side::first) {
        switch (f.rotation) { // h(u | v) = dC/dv
            case 90: h = 1.0 - base_h(f.kind, t, 1.0 - u, v); break;
            case 180: h = 1.0 - base_h(f.kind, t, 1.0 - u, 1.0 - v); break;
            case 270: h = base_h(f.kind, t, u, 1.0 - v); break;
            default: h = base_h(f.kind, t, u, v); break;
        }
    } else {
        switch (f.rotation) { // h(v | u) = dC/du
            case 90: h = base_h(f.kind, t, v, 1.0 - u); break;
            case 180: h = 1.0 - base_h(f.kind, t, 1.0 - v, 1.0 - u); break;
            case 270: h = 1.0 - base_h(f.kind, t, 1.0 - v, u); break;
            default: h = base_h(f.kind, t, v, u); break;
        }
    }
    return interior(h);
}

double hinv(FamilyId f, double t, double w, double cond, Side which) {
    check_theta(f, t);
    check_point(w, cond);
    w = interior(w);
    cond = interior(cond);
    double z;
    if (which == Side::first) {
        switch (f.rotation) {
            case 90: z = 1.0 - base_hinv(f.kind, t, 1.0 - w, cond); break;
            case 180: z = 1.0 - base_hinv(f.kind, t, 1.0 - w, 1.0 - cond); break;
            case 270: z = base_hinv(f.kind, t, w, 1.0 - cond); break;
            default: z = base_hinv(f.kind, t, w, cond); break;
        }
    } else {
        switch (f.rotation) {
            case 90: z = base_hinv(f.kind, t, w, 1.0 - cond); break;
            case 180: z = 1.0 - base_hinv(f.kind, t, 1.0 - w, 1.0 - cond); break;
            case 270: z = 1.0 - base_hinv(f.kind, t, 1.0 - w, cond); break;
            default: z = base_hinv(f.kind, t, w, cond); break;
        }
    }
    return interior(z);
}

double param_to_tau(FamilyId f, double t) {
    check_theta(f, t);
    double tau = base_tau(f.kind, t);
    return (f.rotation == 90 || f.rotation == 270) ? -tau : tau;
}

double tau_to_param(FamilyId f, double tau) {
    if (std::isnan(tau)) throw param_error("tau_to_param: tau is NaN");
    if (f.kind == FamilyKind::independence) {
        if (std::abs(tau) > 1e-12)
            throw param_error("tau_to_param: independence only attains tau = 0");
        return 0.0;
    }
    double base_target = (f.rotation == 90 || f.rotation == 270) ? -tau : tau;
    ParamBounds b = param_bounds(f.kind);
    double tau_lo = base_tau(f.kind, b.lo);
    double tau_hi = base_tau(f.kind, b.hi);
    const double slack = 1e-9;
    if (base_target < tau_lo - slack || base_target > tau_hi + slack)
        throw param_error("tau_to_param: tau " + std::to_string(tau) +
                          " outside attainable range of family " + to_token(f));
    if (f.kind == FamilyKind::frank && std::abs(base_target) < frank_tau(1e-4))
        throw param_error(
            "tau_to_param: tau too close to 0 for family frank (use indep)");
    return base_tau_inv_clamped(f.kind, base_target);
}

// ---------------------------------------------------------------------------
// fitting
// ---------------------------------------------------------------------------

namespace {

// theta-independent transforms, computed once per (data, candidate)
struct PreparedNll {
    FamilyKind kind = FamilyKind::independence;
    std::size_t n = 0;
    std::vector<double> c1, c2; // per-kind coordinate transforms
    double sq_sum = 0.0;        // gaussian: sum x^2 + y^2
    double cross = 0.0;         // gaussian: sum x y
    double sum1 = 0.0, sum2 = 0.0;

    double operator()(double t) const {
        switch (kind) {
            case FamilyKind::independence: return 0.0;
            case FamilyKind::gaussian: {
                double s2 = 1.0 - t * t;
                return 0.5 * static_cast<double>(n) * std::log(s2) +
                       (t * t * sq_sum - 2.0 * t * cross) / (2.0 * s2);
            }
            case FamilyKind::clayton: {
                double acc = 0.0;
                for (std::size_t i = 0; i < n; ++i)
                    acc += clayton_lnA(t, c1[i], c2[i]);
                return -static_cast<double>(n) * std::log1p(t) +
                       (t + 1.0) * sum1 + (2.0 + 1.0 / t) * acc;
            }
            case FamilyKind::gumbel: {
                double acc = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    double ls = gumbel_ls(t, c1[i], c2[i]);
                    double s = std::exp(ls);
                    acc += -s + (1.0 - 2.0 * t) * ls + std::log(s + t - 1.0);
                }
                // sum1 = sum of tx + ty = -(log u + log v)
                return -(acc + sum1 + (t - 1.0) * sum2);
            }
            case FamilyKind::frank: {
                if (std::abs(t) < 1e-12) return 0.0;
                double g1 = std::expm1(-t);
                double acc = 0.0;
                for (std::size_t i = 0; i < n; ++i)
                    acc += std::log(std::abs(frank_d(t, c1[i], c2[i])));
                return -static_cast<double>(n) * std::log(-t * g1) + t * sum1 +
                       2.0 * acc;
            }
            case FamilyKind::joe: {
                double acc = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    double lnA = joe_lnA(t, c1[i], c2[i]);
                    acc += (1.0 / t - 2.0) * lnA +
                           std::log(t - 1.0 + std::exp(lnA));
                }
                return -(acc + (t - 1.0) * sum1);
            }
        }
        return 0.0;
    }
};

PreparedNll prepare_nll(FamilyKind kind, const std::vector<double>& u,
                        const std::vector<double>& v) {
    PreparedNll p;
    p.kind = kind;
    p.n = u.size();
    switch (kind) {
        case FamilyKind::independence: break;
        case FamilyKind::gaussian:
            for (std::size_t i = 0; i < p.n; ++i) {
                double x = norm_quantile(u[i]), y = norm_quantile(v[i]);
                p.sq_sum += x * x + y * y;
                p.cross += x * y;
            }
            break;
        case FamilyKind::clayton:
            p.c1.resize(p.n);
            p.c2.resize(p.n);
            for (std::size_t i = 0; i < p.n; ++i) {
                p.c1[i] = std::log(u[i]);
                p.c2[i] = std::log(v[i]);
                p.sum1 += p.c1[i] + p.c2[i];
            }
            break;
        case FamilyKind::gumbel:
            p.c1.resize(p.n);
            p.c2.resize(p.n);
            for (std::size_t i = 0; i < p.n; ++i) {
                double tx = -std::log(u[i]), ty = -std::log(v[i]);
                p.c1[i] = std::log(tx);
                p.c2[i] = std::log(ty);
                p.sum1 += tx + ty;
                p.sum2 += p.c1[i] + p.c2[i];
            }
            break;
        case FamilyKind::frank:
            p.c1.assign(u.begin(), u.end());
            p.c2.assign(v.begin(), v.end());
            for (std::size_t i = 0; i < p.n; ++i) p.sum1 += u[i] + v[i];
            break;
        case FamilyKind::joe:
            p.c1.resize(p.n);
            p.c2.resize(p.n);
            for (std::size_t i = 0; i < p.n; ++i) {
                p.c1[i] = std::log1p(-u[i]);
                p.c2[i] = std::log1p(-v[i]);
                p.sum1 += p.c1[i] + p.c2[i];
            }
            break;
    }
    return p;
}

void check_fit_data(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size())
        throw param_error("fit_mle: column length mismatch");
    if (u.size() < 10)
        throw data_error("fit_mle: need at least 10 observations, got " +
                         std::to_string(u.size()));
    auto degenerate = [](std::span<const double> col) {
        double mn = col[0], mx = col[0];
        for (double x : col) {
            if (std::isnan(x)) throw data_error("fit_mle: NaN in data");
            mn = std::min(mn, x);
            mx = std::max(mx, x);
        }
        return mx - mn < 1e-12;
    };
    if (degenerate(u) || degenerate(v))
        throw data_error("fit_mle: degenerate (constant) column");
}

} // namespace

PairCopula make_pair_copula(FamilyId family, double theta) {
    check_theta(family, theta);
    PairCopula pc;
    pc.family = family;
    pc.theta = family.kind == FamilyKind::independence ? 0.0 : theta;
    pc.tau = param_to_tau(family, pc.theta);
    pc.loglik = 0.0;
    pc.aic = 2.0 * param_count(family.kind);
    pc.n_obs = 0;
    return pc;
}

PairCopula fit_mle(std::span<const double> u, std::span<const double> v,
                   FamilyId family) {
    if (!rotation_allowed(family.kind, family.rotation))
        throw param_error("fit_mle: invalid rotation for family " +
                          to_token(family));
    check_fit_data(u, v);
    const std::size_t n = u.size();

    PairCopula pc;
    pc.family = family;
    pc.n_obs = n;

    if (family.kind == FamilyKind::independence) {
        pc.theta = 0.0;
        pc.tau = 0.0;
        pc.loglik = 0.0;
        pc.aic = 0.0;
        return pc;
    }

    // rotate data so the optimization always runs against the base family
    std::vector<double> ur(n), vr(n);
    const bool flip_u = family.rotation == 90 || family.rotation == 180;
    const bool flip_v = family.rotation == 180 || family.rotation == 270;
    for (std::size_t i = 0; i < n; ++i) {
        ur[i] = flip_u ? 1.0 - interior(u[i]) : interior(u[i]);
        vr[i] = flip_v ? 1.0 - interior(v[i]) : interior(v[i]);
    }

    double tau_hat = kendall_tau(u, v);
    double base_target =
        (family.rotation == 90 || family.rotation == 270) ? -tau_hat : tau_hat;
    double seed = base_tau_inv_clamped(family.kind, base_target);

    PreparedNll nll = prepare_nll(family.kind, ur, vr);
    ParamBounds b = param_bounds(family.kind);
    double fmin = 0.0;
    double theta = brent_min(nll, b.lo, b.hi, seed, 1e-8, 200, &fmin);

    if (family.kind == FamilyKind::frank && std::abs(theta) < 1e-4) {
        // the open neighborhood of 0 is excluded; take the better edge
        double f_pos = nll(1e-4), f_neg = nll(-1e-4);
        theta = f_pos <= f_neg ? 1e-4 : -1e-4;
        fmin = std::min(f_pos, f_neg);
    }
    if (!std::isfinite(fmin))
        throw numeric_error("fit_mle: likelihood not finite for family " +
                            to_token(family));

    pc.theta = theta;
    pc.tau = param_to_tau(family, theta);
    pc.loglik = -fmin;
    pc.aic = -2.0 * pc.loglik + 2.0 * param_count(family.kind);
    return pc;
}

PairCopula fit_mle(std::span<const UPair> data, FamilyId family) {
    std::vector<double> u(data.size()), v(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        u[i] = data[i].u;
        v[i] = data[i].v;
    }
    return fit_mle(u, v, family);
}

PairCopula select_family(std::span<const double> u, std::span<const double> v,
                         std::span<const FamilyId> candidates) {
    std::vector<FamilyId> fallback;
    if (candidates.empty()) {
        fallback = default_candidates();
        candidates = fallback;
    }
    check_fit_data(u, v);

    bool have_best = false;
    PairCopula best;
    std::string last_err;
    for (FamilyId family : candidates) {
        PairCopula pc;
        try {
            pc = fit_mle(u, v, family);
        } catch (const error& e) {
            last_err = e.what();
            continue;
        }
        if (!have_best || pc.aic < best.aic) {
            best = pc;
            have_best = true;
        }
    }
    if (!have_best)
        throw numeric_error("select_family: every candidate failed; last: " +
                            last_err);
    return best;
}

PairCopula select_family(std::span<const UPair> data,
                         std::span<const FamilyId> candidates) {
    std::vector<double> u(data.size()), v(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        u[i] = data[i].u;
        v[i] = data[i].v;
    }
    return select_family(u, v, candidates);
}

std::vector<UPair> simulate_pair(const PairCopula& pc, std::size_t n,
                                 std::uint64_t seed) {
    check_theta(pc.family, pc.theta);
    Rng rng(seed);
    std::vector<UPair> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double w1 = rng.uniform();
        double w2 = rng.uniform();
        out[i].u = w1;
        out[i].v = hinv(pc, w2, w1, Side::second);
    }
    return out;
}

} // namespace vinerisk
