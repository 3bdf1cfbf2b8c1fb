#pragma once

namespace vinerisk {

double norm_pdf(double x);
double norm_cdf(double x);

// Inverse standard normal CDF; rational approximation polished by Halley
// steps, accurate to machine precision for p in [1e-300, 1 - 1e-16].
double norm_quantile(double p);

// P(X <= x, Y <= y) for a standard bivariate normal with correlation r.
// Drezner-Wesolowsky / Genz hybrid quadrature, absolute error < 5e-16.
double bvn_cdf(double x, double y, double r);

} // namespace vinerisk
