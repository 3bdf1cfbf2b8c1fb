#include "vinerisk/normal.hpp"

#include <cmath>
#include <limits>

namespace vinerisk {

namespace {
constexpr double kSqrt2 = 1.4142135623730950488016887242097;
constexpr double kTwoPi = 6.2831853071795864769252867665590;
constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993438;
} // namespace

double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double norm_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double norm_quantile(double p) {
    if (std::isnan(p)) return std::numeric_limits<double>::quiet_NaN();
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    if (p >= 1.0) return std::numeric_limits<double>::infinity();

    // Acklam's rational approximation, three regimes
    static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                -2.759285104469687e+02, 1.383577518672690e+02,
                                -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                -1.556989798598866e+02, 6.680131188771972e+01,
                                -1.328068155288572e+01};
    static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                -2.400758277161838e+00, -2.549732539343734e+00,
                                4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;

    double x;
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        double q = p - 0.5;
        double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    // two Halley refinements push the ~1e-9 approximation to machine precision
    for (int i = 0; i < 2; ++i) {
        double e = norm_cdf(x) - p;
        double u = e / norm_pdf(x);
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

namespace {

// Upper-quadrant probability P(X > dh, Y > dk), after Drezner & Wesolowsky
// (1990) and Genz's MATLAB bvnu: direct Gauss-Legendre on the correlation
// integral for |r| < 0.925, a singularity-subtracted expansion beyond.
double bvn_upper(double dh, double dk, double r) {
    static const double w6[3] = {0.1713244923791705, 0.3607615730481384,
                                 0.4679139345726904};
    static const double x6[3] = {0.9324695142031522, 0.6612093864662647,
                                 0.2386191860831970};
    static const double w12[6] = {0.04717533638651177, 0.1069393259953183,
                                  0.1600783285433464,  0.2031674267230659,
                                  0.2334925365383547,  0.2491470458134029};
    static const double x12[6] = {0.9815606342467191, 0.9041172563704750,
                                  0.7699026741943050, 0.5873179542866171,
                                  0.3678314989981802, 0.1252334085114692};
    static const double w20[10] = {0.01761400713915212, 0.04060142980038694,
                                   0.06267204833410906, 0.08327674157670475,
                                   0.1019301198172404,  0.1181945319615184,
                                   0.1316886384491766,  0.1420961093183821,
                                   0.1491729864726037,  0.1527533871307259};
    static const double x20[10] = {0.9931285991850949,  0.9639719272779138,
                                   0.9122344282513259,  0.8391169718222188,
                                   0.7463319064601508,  0.6360536807265150,
                                   0.5108670019508271,  0.3737060887154196,
                                   0.2277858511416451,  0.07652652113349733};

    if (std::isinf(dh) && dh > 0.0) return 0.0;
    if (std::isinf(dk) && dk > 0.0) return 0.0;
    if (std::isinf(dh)) return std::isinf(dk) ? 1.0 : norm_cdf(-dk);
    if (std::isinf(dk)) return norm_cdf(-dh);
    if (r == 0.0) return norm_cdf(-dh) * norm_cdf(-dk);

    const double* w;
    const double* xg;
    int lg;
    double ar = std::abs(r);
    if (ar < 0.3) {
        w = w6; xg = x6; lg = 3;
    } else if (ar < 0.75) {
        w = w12; xg = x12; lg = 6;
    } else {
        w = w20; xg = x20; lg = 10;
    }

    double h = dh, k = dk;
    double hk = h * k;
    double bvn = 0.0;

    if (ar < 0.925) {
        double hs = 0.5 * (h * h + k * k);
        double asr = 0.5 * std::asin(r);
        for (int i = 0; i < lg; ++i) {
            for (int is = -1; is <= 1; is += 2) {
                double sn = std::sin(asr * (1.0 + is * xg[i]));
                bvn += w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
            }
        }
        return bvn * asr / kTwoPi + norm_cdf(-h) * norm_cdf(-k);
    }

    if (r < 0.0) {
        k = -k;
        hk = -hk;
    }
    if (ar < 1.0) {
        double as = 1.0 - r * r;
        double a = std::sqrt(as);
        double bs = (h - k) * (h - k);
        double asr = -0.5 * (bs / as + hk);
        double c = (4.0 - hk) / 8.0;
        double d = (12.0 - hk) / 80.0;
        if (asr > -100.0)
            bvn = a * std::exp(asr) *
                  (1.0 - c * (bs - as) * (1.0 - d * bs) / 3.0 + c * d * as * as);
        if (hk > -100.0) {
            double b = std::sqrt(bs);
            double sp = std::sqrt(kTwoPi) * norm_cdf(-b / a);
            bvn -= std::exp(-0.5 * hk) * sp * b * (1.0 - c * bs * (1.0 - d * bs) / 3.0);
        }
        a *= 0.5;
        double quad = 0.0;
        for (int i = 0; i < lg; ++i) {
            for (int is = -1; is <= 1; is += 2) {
                double xs = a * (1.0 + is * xg[i]);
                xs *= xs;
                double asr1 = -0.5 * (bs / xs + hk);
                if (asr1 > -100.0) {
                    double rs = std::sqrt(1.0 - xs);
                    double sp = 1.0 + c * xs * (1.0 + 5.0 * d * xs);
                    double ep = std::exp(-0.5 * hk * xs / ((1.0 + rs) * (1.0 + rs))) / rs;
                    quad += w[i] * std::exp(asr1) * (sp - ep);
                }
            }
        }
        bvn = (a * quad - bvn) / kTwoPi;
    }
    if (r > 0.0) {
        bvn += norm_cdf(-std::max(h, k));
    } else {
        bvn = -bvn;
        if (k > h) {
            double l;
            if (h < 0.0)
                l = norm_cdf(k) - norm_cdf(h);
            else
                l = norm_cdf(-h) - norm_cdf(-k);
            bvn += l;
        }
    }
    return std::min(1.0, std::max(0.0, bvn));
}

} // namespace

double bvn_cdf(double x, double y, double r) { return bvn_upper(-x, -y, r); }

} // namespace vinerisk
