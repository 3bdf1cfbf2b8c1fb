#include "doctest.h"

#include <cmath>
#include <vector>

#include "vinerisk/dependence.hpp"
#include "vinerisk/errors.hpp"
#include "vinerisk/rng.hpp"
#include "oracles.hpp"

using namespace vinerisk;

namespace {
using vec = std::vector<double>;
}

TEST_CASE("kendall tau pinned values") {
    CHECK(kendall_tau(vec{1, 2, 3, 4}, vec{1, 2, 3, 4}) == doctest::Approx(1.0));
    CHECK(kendall_tau(vec{1, 2, 3, 4}, vec{4, 3, 2, 1}) == doctest::Approx(-1.0));
    CHECK(kendall_tau(vec{1, 2, 3}, vec{1, 3, 2}) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("kendall tau agrees with the quadratic count") {
    Rng rng(314);
    for (int rep = 0; rep < 12; ++rep) {
        std::size_t n = 20 + static_cast<std::size_t>(rng.raw() % 181);
        vec x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            // coarse rounding provokes ties in both margins
            x[i] = std::floor(rng.uniform() * 12.0);
            y[i] = std::floor(x[i] / 2.0 + rng.uniform() * 8.0);
        }
        CHECK(kendall_tau(x, y) ==
              doctest::Approx(oracles::kendall_tau_bruteforce(x, y)).epsilon(1e-13));
    }
}

TEST_CASE("kendall tau is rank invariant and antisymmetric") {
    Rng rng(99);
    vec x(300), y(300);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = rng.normal();
        y[i] = 0.6 * x[i] + rng.normal();
    }
    double base = kendall_tau(x, y);
    vec gx, hy, ny;
    for (std::size_t i = 0; i < x.size(); ++i) {
        gx.push_back(std::exp(x[i]));
        hy.push_back(std::atan(y[i]) * 3.0 + 7.0);
        ny.push_back(-y[i]);
    }
    CHECK(kendall_tau(gx, hy) == doctest::Approx(base).epsilon(1e-15));
    CHECK(kendall_tau(x, ny) == doctest::Approx(-base).epsilon(1e-15));
}

TEST_CASE("kendall tau input validation") {
    CHECK_THROWS_AS(kendall_tau(vec{1, 2}, vec{1, 2, 3}), data_error);
    CHECK_THROWS_AS(kendall_tau(vec{1}, vec{1}), data_error);
    CHECK_THROWS_AS(kendall_tau(vec{2, 2, 2}, vec{1, 2, 3}), data_error);
    CHECK_THROWS_AS(kendall_tau(vec{1, 2, std::nan("")}, vec{1, 2, 3}), data_error);
}

TEST_CASE("tau matrix structure") {
    Rng rng(2718);
    vec a(10000), b(10000);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = rng.uniform();
        b[i] = rng.uniform();
    }
    auto m = tau_matrix(std::vector<vec>{a, b, a});
    REQUIRE(m.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(m[i][i] == doctest::Approx(1.0));
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(m[i][j] == doctest::Approx(m[j][i]));
    }
    CHECK(std::abs(m[0][1]) < 0.03);
    CHECK(m[0][2] == doctest::Approx(1.0));
    CHECK(m[0][1] == doctest::Approx(kendall_tau(a, b)));
}

TEST_CASE("named tau matrix reports the failing pair") {
    std::vector<NamedColumn> cols{{"frost", {1, 2, 3}}, {"flat", {5, 5, 5}}};
    try {
        tau_matrix(cols);
        FAIL("expected data_error");
    } catch (const data_error& e) {
        std::string msg = e.what();
        CHECK(msg.find("frost") != std::string::npos);
        CHECK(msg.find("flat") != std::string::npos);
    }
    std::vector<NamedColumn> good{{"a", {1, 2, 3, 4}}, {"b", {2, 1, 4, 3}}};
    auto m = tau_matrix(good);
    CHECK(m[0][1] == doctest::Approx(kendall_tau(good[0].values, good[1].values)));
}

TEST_CASE("tau matrix csv emits names and diagonal") {
    auto m = tau_matrix(std::vector<vec>{{1, 2, 3, 4, 5}, {2, 1, 4, 3, 5}});
    std::string csv = tau_matrix_csv({"frost", "drought"}, m);
    CHECK(csv.find("variable,frost,drought") == 0);
    CHECK(csv.find("\nfrost,1,") != std::string::npos);
    CHECK(csv.find("\ndrought,") != std::string::npos);
}
