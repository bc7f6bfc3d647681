#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "cogra/quadrature.hpp"

using namespace cogra;

TEST_CASE("finite intervals reproduce known antiderivatives") {
    auto sq = [](double x) { return x * x; };
    CHECK(integrate(sq, 0.0, 1.0, 1e-10).value == Catch::Approx(1.0 / 3.0).epsilon(1e-12));

    auto s = [](double x) { return std::sin(x); };
    CHECK(integrate(s, 0.0, M_PI, 1e-10).value == Catch::Approx(2.0).epsilon(1e-12));

    auto osc = [](double x) { return std::sin(50.0 * x); };
    const double expect = (1.0 - std::cos(500.0)) / 50.0;
    CHECK(integrate(osc, 0.0, 10.0, 1e-10).value ==
          Catch::Approx(expect).margin(1e-9));
}

TEST_CASE("semi-infinite upper limits use the rational substitution") {
    auto e = [](double x) { return std::exp(-x); };
    CHECK(integrate_upto_inf(e, 0.0, kInf, 1e-10).value ==
          Catch::Approx(1.0).margin(1e-9));

    auto cauchy_tail = [](double x) { return 1.0 / ((1.0 + x) * (1.0 + x)); };
    CHECK(integrate_upto_inf(cauchy_tail, 0.0, kInf, 1e-10).value ==
          Catch::Approx(1.0).margin(1e-9));

    auto xe = [](double x) { return x * std::exp(-x); };
    CHECK(integrate_upto_inf(xe, 2.0, kInf, 1e-10).value ==
          Catch::Approx(3.0 * std::exp(-2.0)).margin(1e-9));
}

TEST_CASE("2-D nested rule on separable and ratio-law integrands") {
    auto xy = [](double x, double y) { return x * y; };
    CHECK(integrate2d(xy, 0.0, 1.0, 0.0, 1.0, 1e-10).value ==
          Catch::Approx(0.25).margin(1e-9));

    auto expxy = [](double x, double y) { return std::exp(-x - y); };
    CHECK(integrate2d(expxy, 0.0, kInf, 0.0, kInf, 1e-8).value ==
          Catch::Approx(1.0).margin(1e-7));

    // total mass of the substituted alpha-beta density is 1 for any scales
    for (double A : {0.5, 33.333333333333336}) {
        for (double B : {2.0, 33.333333333333336}) {
            auto mass = [A, B](double x, double y) {
                const double u = A * y + x;
                const double v = B + x * y;
                return 2.0 * A * B * x * y / (u * u * v * v);
            };
            QuadResult r = integrate2d(mass, 0.0, kInf, 0.0, kInf, 1e-8);
            CHECK(r.converged);
            CHECK(r.value == Catch::Approx(1.0).margin(1e-6));
        }
    }
}

TEST_CASE("tolerance drives refinement") {
    auto peaked = [](double x) { return 1.0 / (1e-4 + x * x); };
    const double expect = std::atan(1.0 / 1e-2) / 1e-2 * 2.0;
    const double loose =
        integrate(peaked, -1.0, 1.0, 1e-4).value;
    const double tight =
        integrate(peaked, -1.0, 1.0, 1e-10).value;
    CHECK(std::fabs(tight - expect) <= std::fabs(loose - expect) + 1e-12);
    CHECK(tight == Catch::Approx(expect).epsilon(1e-10));
}

TEST_CASE("non-convergence is reported, not hidden") {
    auto singular = [](double x) { return std::pow(x, -0.95); };
    QuadResult r = integrate(singular, 0.0, 1.0, 1e-12, 2000);
    CHECK_FALSE(r.converged);

    auto corner = [](double x, double y) {
        const double u = x + y;
        return 1.0 / (u * u);
    };
    CHECK_THROWS_AS(
        integrate2d_checked(corner, 0.0, 1.0, 0.0, 1.0, 1e-10, "corner", 300000),
        NumericError);
}
