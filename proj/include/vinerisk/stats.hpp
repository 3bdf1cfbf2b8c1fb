#pragma once

#include <cstddef>
#include <span>

namespace vinerisk {

// Interpolated order-statistic quantile (the sorted[(n-1)p] convention) on an
// ascending-sorted sample.
inline double quantile_type7(std::span<const double> sorted, double p) {
    double pos = p * static_cast<double>(sorted.size() - 1);
    std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= sorted.size()) return sorted.back();
    double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

} // namespace vinerisk
