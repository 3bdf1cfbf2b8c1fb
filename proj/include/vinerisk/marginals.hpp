#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace vinerisk {

// Gaussian-kernel density estimate on a fixed 512-point grid, with the
// cumulative trapezoid CDF alongside.  Immutable after fit; evaluation is
// pure interpolation.
struct KernelMarginal {
    std::size_t sample_size = 0;
    double bandwidth = 0.0;
    double lo = 0.0, hi = 0.0; // grid span: [min - 3h, max + 3h]
    std::vector<double> x;     // ascending, size 512
    std::vector<double> pdf;
    std::vector<double> cdf;   // strictly increasing, ends at 1
};

// Normal-reference bandwidth 1.06 * min(sd, iqr/1.34) * n^(-1/5).
// Non-finite values are dropped; needs >= 10 finite points with spread.
KernelMarginal fit_kde(const std::vector<double>& sample);

// Interpolated grid CDF; outside the grid span clamps to [1e-10, 1 - 1e-10].
double cdf_eval(const KernelMarginal& m, double x);

// Inverse of cdf_eval by interpolation on the cdf column; alpha in (0,1).
double quantile_eval(const KernelMarginal& m, double alpha);

// Fit plus elementwise probability integral transform of the sample.
std::pair<KernelMarginal, std::vector<double>>
pit_transform(const std::vector<double>& sample);

} // namespace vinerisk
