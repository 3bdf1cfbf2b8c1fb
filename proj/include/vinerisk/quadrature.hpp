#pragma once

#include <cstddef>
#include <vector>

namespace vinerisk {

// Gauss-Legendre rule on [-1, 1]; nodes ascending, weights positive.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Rules are computed on first use (Newton on the Legendre recurrence) and
// cached per order.
const GaussRule& gauss_legendre(std::size_t n);

// \int_a^b f(x) dx with an n-point rule
template <typename F>
double gauss_integrate(F&& f, double a, double b, std::size_t n) {
    const GaussRule& rule = gauss_legendre(n);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return half * acc;
}

} // namespace vinerisk
