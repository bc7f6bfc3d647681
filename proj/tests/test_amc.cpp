#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "cogra/amc.hpp"

using namespace cogra;

namespace {

// table whose thresholds at target 0.5 are exactly the given values
// (fit_slope 1, fit_a = 0.5 * e^g)
AmcTable table_with_thresholds(const std::vector<double>& g) {
    std::vector<std::array<double, 3>> modes;
    for (size_t n = 0; n < g.size(); ++n)
        modes.push_back({static_cast<double>(n + 1), 0.5 * std::exp(g[n]), 1.0});
    return AmcTable(modes);
}

}  // namespace

TEST_CASE("fitted BER evaluates the exponential model") {
    const AmcMode m{1, 1.0, 1.0, 1.0};
    CHECK(ber_probability(0.0, m) == Catch::Approx(1.0));
    CHECK(ber_probability(std::log(1e5), m) == Catch::Approx(1e-5).epsilon(1e-12));

    const AmcMode outage{0, 0.0, 0.0, 0.0};
    CHECK_THROWS_AS(ber_probability(5.0, outage), std::invalid_argument);
}

TEST_CASE("threshold inversion") {
    const AmcMode m{1, 1.0, 1.0, 1.0};
    CHECK(snir_threshold(m, BerTarget(std::exp(-2.0))) ==
          Catch::Approx(2.0).epsilon(1e-12));

    const AmcMode half{1, 1.0, 0.5, 3.0};
    CHECK(snir_threshold(half, BerTarget(0.5)) == Catch::Approx(0.0).margin(1e-15));

    CHECK_THROWS_AS(BerTarget(2.0), std::invalid_argument);
    CHECK_THROWS_AS(snir_threshold(half, BerTarget(0.9)), std::invalid_argument);
}

TEST_CASE("round trip: ber(threshold(B0)) = B0") {
    const AmcTable table = default_80211a_table();
    for (double b0 : {1e-3, 1e-5, 1e-7}) {
        const BerTarget target(b0);
        for (int n = 1; n <= table.max_mode(); ++n) {
            const double g = snir_threshold(table.mode(n), target);
            CHECK(ber_probability(g, table.mode(n)) ==
                  Catch::Approx(b0).epsilon(1e-12));
        }
    }
}

TEST_CASE("thresholds increase strictly with the mode index") {
    const AmcTable table = default_80211a_table();
    for (double b0 : {1e-3, 1e-5, 1e-7}) {
        const std::vector<double> g = snir_thresholds(table, BerTarget(b0));
        for (size_t n = 1; n < g.size(); ++n) CHECK(g[n] > g[n - 1]);
    }
}

TEST_CASE("fitted BER decreases strictly in SNIR") {
    const AmcTable table = default_80211a_table();
    for (int n = 1; n <= table.max_mode(); ++n) {
        double prev = ber_probability(0.0, table.mode(n));
        for (double gamma = 0.5; gamma <= 40.0; gamma += 0.5) {
            const double cur = ber_probability(gamma, table.mode(n));
            CHECK(cur < prev);
            prev = cur;
        }
    }
}

TEST_CASE("threshold convexity check") {
    SECTION("increasing slopes pass") {
        const AmcTable t = table_with_thresholds({1.0, 3.0, 7.0});
        const ConvexityReport r = threshold_convexity_check(t, BerTarget(0.5));
        CHECK(r.pass);
    }
    SECTION("a sag is caught with its first violating triple") {
        const AmcTable t = table_with_thresholds({1.0, 5.0, 6.0});
        const ConvexityReport r = threshold_convexity_check(t, BerTarget(0.5));
        REQUIRE_FALSE(r.pass);
        CHECK(r.n == 3);
        CHECK(r.b == 1);
        CHECK(r.c == 1);
    }
    SECTION("the shipped table is convex at all working targets") {
        const AmcTable table = default_80211a_table();
        for (double b0 : {1e-3, 1e-5, 1e-7})
            CHECK(threshold_convexity_check(table, BerTarget(b0)).pass);
    }
}

TEST_CASE("mode selection from SNIR") {
    const std::vector<double> g{0.0, 1.0, 4.0, 9.0};
    CHECK(mode_from_snir(0.5, g) == 0);
    CHECK(mode_from_snir(1.0, g) == 1);
    CHECK(mode_from_snir(8.9, g) == 2);
    CHECK(mode_from_snir(1e9, g) == 3);
}

TEST_CASE("table validation rejects malformed inputs") {
    CHECK_THROWS_AS(AmcTable({}), std::invalid_argument);
    CHECK_THROWS_AS(AmcTable({{1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(AmcTable({{1.0, -1.0, 1.0}}), std::invalid_argument);
}
