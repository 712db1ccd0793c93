#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "tcclock/fitting.hpp"

using namespace tcclock;

TEST_CASE("exact line is recovered with r^2 = 1") {
    const std::vector<double> x = {1.0, 2.0, 3.0, 4.0, 5.0};
    std::vector<double> y;
    for (double v : x) y.push_back(2.5 * v - 0.75);
    const FitResult f = fit_linear(x, y);
    CHECK(f.slope == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(f.intercept == doctest::Approx(-0.75).epsilon(1e-12));
    CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.model == "linear");
}

TEST_CASE("least squares residual behavior") {
    const std::vector<double> x = {0.0, 1.0, 2.0, 3.0};
    const std::vector<double> y = {0.1, 0.9, 2.1, 2.9};
    const FitResult f = fit_linear(x, y);
    CHECK(f.slope == doctest::Approx(0.96).epsilon(1e-10));
    CHECK(f.r_squared > 0.99);
    CHECK(f.r_squared < 1.0);
}

TEST_CASE("fit rejects degenerate input") {
    CHECK_THROWS_AS(fit_linear({1.0, 2.0}, {1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(fit_linear({1.0, 1.0, 1.0}, {1.0, 2.0, 3.0}), std::invalid_argument);
    CHECK_THROWS_AS(fit_linear({1.0, 2.0, 3.0}, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("power law y = x^2 gives slope 2") {
    const std::vector<double> x = {1.0, 2.0, 4.0, 8.0, 16.0};
    std::vector<double> y;
    for (double v : x) y.push_back(3.0 * v * v);
    const FitResult f = fit_power_law(x, y);
    CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(f.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    CHECK(f.model == "log-log");
    CHECK_THROWS_AS(fit_power_law({1.0, -2.0, 3.0}, {1.0, 2.0, 3.0}), std::invalid_argument);
}

TEST_CASE("time-crystal frequency") {
    CHECK(tc_frequency(1.0, 1e-3) == doctest::Approx(0.0));
    // (gamma0 / 2 pi) sqrt(3) at lambda = 2.
    CHECK(tc_frequency(2.0, 1e-3) == doctest::Approx(2.7566444771338406e-4).epsilon(1e-12));
    CHECK_THROWS_AS(tc_frequency(0.9, 1e-3), std::invalid_argument);
}

TEST_CASE("resolution fit excludes near-critical points") {
    const double gamma0 = 1e-3;
    std::vector<double> lambdas = {1.05, 1.3, 1.5, 1.7, 2.0};
    std::vector<double> rs;
    for (double l : lambdas) rs.push_back(1.02 * tc_frequency(l, gamma0) + 1e-6);
    // Poison the sub-threshold point; it must be ignored.
    rs[0] = 1.0;
    const FitResult f = fit_resolution(lambdas, rs, gamma0);
    CHECK(f.slope == doctest::Approx(1.02).epsilon(1e-9));
    CHECK(f.intercept == doctest::Approx(1e-6).epsilon(1e-6));
    CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(f.model == "resolution-vs-nu");
}

TEST_CASE("threshold scaling fit normalizes by the total spin") {
    const double s = 25.0;
    std::vector<double> lambdas = {1.1, 1.3, 1.5, 1.7, 2.0};
    std::vector<double> ms;
    for (double l : lambdas) ms.push_back(s * (7.31 * l - 0.435));
    ms[0] = 1.0;  // below the fit window, ignored
    const FitResult f = fit_threshold_scaling(lambdas, ms, s);
    CHECK(f.slope == doctest::Approx(7.31).epsilon(1e-10));
    CHECK(f.intercept == doctest::Approx(-0.435).epsilon(1e-8));
}
