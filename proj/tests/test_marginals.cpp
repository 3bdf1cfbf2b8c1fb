#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "vinerisk/errors.hpp"
#include "vinerisk/marginals.hpp"
#include "vinerisk/rng.hpp"

using namespace vinerisk;

namespace {

std::vector<double> normal_draws(std::size_t n, std::uint64_t seed,
                                 double mu = 0.0, double sigma = 1.0) {
    Rng rng(seed);
    std::vector<double> out(n);
    for (double& v : out) v = mu + sigma * rng.normal();
    return out;
}

double ks_uniform_distance(std::vector<double> u) {
    std::sort(u.begin(), u.end());
    double n = static_cast<double>(u.size());
    double d = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        d = std::max(d, u[i] - static_cast<double>(i) / n);
        d = std::max(d, static_cast<double>(i + 1) / n - u[i]);
    }
    return d;
}

} // namespace

TEST_CASE("kde matches large-sample truth at the center") {
    auto m = fit_kde(normal_draws(10000, 2024));
    CHECK(std::abs(cdf_eval(m, 0.0) - 0.5) < 0.02);
    CHECK(m.bandwidth > 0.0);
    CHECK(m.sample_size == 10000);
}

TEST_CASE("kde grid invariants") {
    auto m = fit_kde(normal_draws(2000, 7));
    REQUIRE(m.x.size() == 512);
    REQUIRE(m.pdf.size() == 512);
    REQUIRE(m.cdf.size() == 512);
    CHECK(m.cdf.front() < 1e-6);
    CHECK(m.cdf.back() > 1.0 - 1e-6);
    for (std::size_t i = 1; i < m.x.size(); ++i) {
        CHECK(m.x[i] > m.x[i - 1]);
        CHECK(m.cdf[i] > m.cdf[i - 1]);
    }
    double mass = 0.0;
    for (std::size_t i = 1; i < m.x.size(); ++i)
        mass += 0.5 * (m.x[i] - m.x[i - 1]) * (m.pdf[i] + m.pdf[i - 1]);
    CHECK(std::abs(mass - 1.0) < 1e-3);
    for (double p : m.pdf) CHECK(p >= 0.0);
}

TEST_CASE("degenerate and short samples are rejected") {
    CHECK_THROWS_AS(fit_kde(std::vector<double>(50, 3.25)), data_error);
    CHECK_THROWS_AS(fit_kde({1.0, 2.0, 3.0}), data_error);
    std::vector<double> mostly_nan(40, std::nan(""));
    mostly_nan[0] = 1.0;
    mostly_nan[1] = 2.0;
    CHECK_THROWS_AS(fit_kde(mostly_nan), data_error);
}

TEST_CASE("median of 1..100 lands near the midrank median") {
    std::vector<double> xs(100);
    for (int i = 0; i < 100; ++i) xs[static_cast<std::size_t>(i)] = i + 1.0;
    auto m = fit_kde(xs);
    double med = quantile_eval(m, 0.5);
    CHECK(med >= 45.0);
    CHECK(med <= 56.0);
}

TEST_CASE("cdf clamps outside the support") {
    auto m = fit_kde(normal_draws(500, 99));
    CHECK(cdf_eval(m, m.lo - 10.0) == doctest::Approx(1e-10));
    CHECK(cdf_eval(m, m.hi + 10.0) == doctest::Approx(1.0 - 1e-10));
}

TEST_CASE("cdf and quantile are mutual inverses") {
    auto m = fit_kde(normal_draws(3000, 31, 2.0, 0.7));
    for (double alpha : {0.05, 0.5, 0.95})
        CHECK(std::abs(cdf_eval(m, quantile_eval(m, alpha)) - alpha) < 1e-6);
    double grid_step = (m.hi - m.lo) / 511.0;
    for (double x : {1.0, 1.8, 2.0, 2.5, 3.3})
        CHECK(std::abs(quantile_eval(m, cdf_eval(m, x)) - x) < grid_step);
}

TEST_CASE("quantile is monotone and symmetric samples center at zero") {
    std::vector<double> xs = normal_draws(4000, 55);
    std::vector<double> sym;
    for (double v : xs) { sym.push_back(v); sym.push_back(-v); }
    auto m = fit_kde(sym);
    CHECK(std::abs(quantile_eval(m, 0.5)) < 0.05);
    double prev = quantile_eval(m, 0.01);
    for (int i = 2; i <= 99; ++i) {
        double q = quantile_eval(m, i / 100.0);
        CHECK(q >= prev);
        prev = q;
    }
    CHECK_THROWS_AS(quantile_eval(m, 0.0), param_error);
    CHECK_THROWS_AS(quantile_eval(m, 1.0), param_error);
}

TEST_CASE("pit output is interior, order preserving, near uniform") {
    Rng rng(1234);
    std::vector<double> xs(10000);
    for (double& v : xs) v = rng.uniform();
    auto [m, u] = pit_transform(xs);
    REQUIRE(u.size() == xs.size());
    for (double v : u) {
        CHECK(v > 0.0);
        CHECK(v < 1.0);
    }
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (xs[i - 1] < xs[i]) CHECK(u[i - 1] <= u[i]);
    CHECK(ks_uniform_distance(u) < 0.03);
}

TEST_CASE("pit histogram is flat for varied shapes") {
    auto check_hist = [](const std::vector<double>& xs) {
        auto [m, u] = pit_transform(xs);
        std::vector<double> bins(10, 0.0);
        for (double v : u)
            bins[std::min<std::size_t>(static_cast<std::size_t>(v * 10.0), 9)] += 1.0;
        for (double b : bins)
            CHECK(std::abs(b / static_cast<double>(u.size()) - 0.1) < 0.02);
    };
    check_hist(normal_draws(10000, 81));
    Rng rng(82);
    std::vector<double> expo(10000);
    for (double& v : expo) v = -std::log(rng.uniform());
    check_hist(expo);
    std::vector<double> bimodal(10000);
    for (double& v : bimodal)
        v = (rng.uniform() < 0.5 ? -2.0 : 2.0) + rng.normal();
    check_hist(bimodal);
}

TEST_CASE("fit is scale equivariant") {
    std::vector<double> xs = normal_draws(1500, 4242, 1.0, 2.0);
    const double c = 3.5;
    std::vector<double> scaled;
    for (double v : xs) scaled.push_back(c * v);
    auto m1 = fit_kde(xs);
    auto m2 = fit_kde(scaled);
    CHECK(m2.bandwidth == doctest::Approx(c * m1.bandwidth).epsilon(1e-12));
    CHECK(m2.lo == doctest::Approx(c * m1.lo).epsilon(1e-12));
    CHECK(m2.hi == doctest::Approx(c * m1.hi).epsilon(1e-12));
    for (double x : {-1.0, 0.5, 1.0, 3.0})
        CHECK(std::abs(cdf_eval(m2, c * x) - cdf_eval(m1, x)) < 1e-9);
    for (double a : {0.1, 0.5, 0.9})
        CHECK(quantile_eval(m2, a) ==
              doctest::Approx(c * quantile_eval(m1, a)).epsilon(1e-9));
}
