#include "vinerisk/marginals.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "vinerisk/errors.hpp"
#include "vinerisk/normal.hpp"
#include "vinerisk/stats.hpp"

namespace vinerisk {

namespace {

constexpr std::size_t kGridSize = 512;
constexpr double kClampEps = 1e-10;

} // namespace

KernelMarginal fit_kde(const std::vector<double>& sample) {
    std::vector<double> xs;
    xs.reserve(sample.size());
    for (double v : sample)
        if (std::isfinite(v)) xs.push_back(v);
    if (xs.size() < 10)
        throw data_error("fit_kde: need at least 10 finite observations, got " +
                         std::to_string(xs.size()));

    std::size_t n = xs.size();
    double mean = 0.0;
    for (double v : xs) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : xs) ss += (v - mean) * (v - mean);
    double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(sd > 0.0))
        throw data_error("fit_kde: sample has zero variance");

    std::vector<double> sorted = xs;
    std::sort(sorted.begin(), sorted.end());
    double iqr = quantile_type7(sorted, 0.75) - quantile_type7(sorted, 0.25);
    double spread = sd;
    if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
    double h = 1.06 * spread * std::pow(static_cast<double>(n), -0.2);

    KernelMarginal m;
    m.sample_size = n;
    m.bandwidth = h;
    m.lo = sorted.front() - 3.0 * h;
    m.hi = sorted.back() + 3.0 * h;
    m.x.resize(kGridSize);
    m.pdf.resize(kGridSize);
    m.cdf.resize(kGridSize);

    double step = (m.hi - m.lo) / static_cast<double>(kGridSize - 1);
    for (std::size_t i = 0; i < kGridSize; ++i) {
        double xi = m.lo + step * static_cast<double>(i);
        m.x[i] = xi;
        double acc = 0.0;
        for (double v : xs) acc += norm_pdf((xi - v) / h);
        m.pdf[i] = acc / (static_cast<double>(n) * h);
    }

    m.cdf[0] = 0.0;
    for (std::size_t i = 1; i < kGridSize; ++i)
        m.cdf[i] = m.cdf[i - 1] + 0.5 * step * (m.pdf[i - 1] + m.pdf[i]);
    double total = m.cdf.back();
    if (!(total > 0.0))
        throw numeric_error("fit_kde: density integrated to zero");
    for (double& c : m.cdf) c /= total;
    // widely separated clusters can underflow the kernel between them; keep
    // the cdf strictly increasing so quantile inversion stays well defined
    for (std::size_t i = 1; i < kGridSize; ++i)
        if (m.cdf[i] <= m.cdf[i - 1])
            m.cdf[i] = std::nextafter(m.cdf[i - 1], 2.0);
    return m;
}

double cdf_eval(const KernelMarginal& m, double x) {
    double p;
    if (x <= m.lo) {
        p = 0.0;
    } else if (x >= m.hi) {
        p = 1.0;
    } else {
        auto it = std::upper_bound(m.x.begin(), m.x.end(), x);
        std::size_t j = static_cast<std::size_t>(it - m.x.begin());
        double frac = (x - m.x[j - 1]) / (m.x[j] - m.x[j - 1]);
        p = m.cdf[j - 1] + frac * (m.cdf[j] - m.cdf[j - 1]);
    }
    return std::clamp(p, kClampEps, 1.0 - kClampEps);
}

double quantile_eval(const KernelMarginal& m, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw param_error("quantile_eval: alpha must be in (0,1), got " +
                          std::to_string(alpha));
    if (alpha <= m.cdf.front()) return m.x.front();
    if (alpha >= m.cdf.back()) return m.x.back();
    auto it = std::upper_bound(m.cdf.begin(), m.cdf.end(), alpha);
    std::size_t j = static_cast<std::size_t>(it - m.cdf.begin());
    double frac = (alpha - m.cdf[j - 1]) / (m.cdf[j] - m.cdf[j - 1]);
    return m.x[j - 1] + frac * (m.x[j] - m.x[j - 1]);
}

std::pair<KernelMarginal, std::vector<double>>
pit_transform(const std::vector<double>& sample) {
    KernelMarginal m = fit_kde(sample);
    std::vector<double> u;
    u.reserve(sample.size());
    for (double v : sample)
        if (std::isfinite(v)) u.push_back(cdf_eval(m, v));
    return {std::move(m), std::move(u)};
}

} // namespace vinerisk
