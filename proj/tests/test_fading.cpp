#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "cogra/fading.hpp"
#include "cogra/quadrature.hpp"

using namespace cogra;

TEST_CASE("ratio pdf pins down the known special values") {
    CHECK(ratio_pdf(0.0, 1.0, 1.0, 0.0, 1.0, 1.0) == Catch::Approx(1.0));
    CHECK_THROWS_AS(ratio_pdf(1.0, -1.0, 1.0, 0.0, 1.0, 1.0),
                    std::invalid_argument);
}

TEST_CASE("ratio pdf integrates to one") {
    auto f = [](double y) { return ratio_pdf(y, 2.0, 3.0, 0.5, 1.0, 2.0); };
    const QuadResult r = integrate_upto_inf(f, 0.0, kInf, 1e-8);
    CHECK(r.converged);
    CHECK(r.value == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("ratio cdf limits and symmetry") {
    CHECK(ratio_cdf(1e12, 1.0, 2.0, 0.3, 1.5, 0.7) ==
          Catch::Approx(1.0).margin(1e-9));
    // iid ratio with no offset: median at 1
    CHECK(ratio_cdf(1.0, 1.0, 1.0, 0.0, 1.0, 1.0) == Catch::Approx(0.5));
}

TEST_CASE("finite difference of the cdf recovers the pdf") {
    const double q1 = 1.7, q2 = 0.6, q3 = 0.9, m1 = 1.3, m2 = 0.8;
    for (double y : {0.05, 0.3, 1.0, 2.5, 7.0, 20.0}) {
        const double h = 1e-6 * std::max(1.0, y);
        const double fd = (ratio_cdf(y + h, q1, q2, q3, m1, m2) -
                           ratio_cdf(y - h, q1, q2, q3, m1, m2)) /
                          (2.0 * h);
        CHECK(fd == Catch::Approx(ratio_pdf(y, q1, q2, q3, m1, m2)).margin(1e-6));
    }
}

TEST_CASE("ratio cdf without offset is scale invariant") {
    // depends on y0 only through y0 / ((m1 q1)/(m2 q2))
    const double base = ratio_cdf(0.8, 1.0, 1.0, 0.0, 1.0, 1.0);
    CHECK(ratio_cdf(0.8 * 6.0, 3.0, 1.0, 0.0, 2.0, 1.0) == Catch::Approx(base));
    CHECK(ratio_cdf(0.8 / 10.0, 1.0, 4.0, 0.0, 1.0, 2.5) == Catch::Approx(base));
}

TEST_CASE("ratio pdf stays nonnegative and cdf monotone on a dense grid") {
    const double q1 = 0.4, q2 = 2.2, q3 = 1.3, m1 = 0.9, m2 = 3.0;
    double prev = 0.0;
    for (int k = 0; k <= 2000; ++k) {
        const double y = 0.02 * k;
        CHECK(ratio_pdf(y, q1, q2, q3, m1, m2) >= 0.0);
        const double c = ratio_cdf(y, q1, q2, q3, m1, m2);
        CHECK(c >= prev);
        CHECK(c <= 1.0);
        prev = c;
    }
}

TEST_CASE("path loss geometry maps to symmetric cross gains") {
    const GainModel a = gains_from_pathloss({1.0, 3.0, 1.0}, 0.01);
    CHECK(a.mean_s12 == Catch::Approx(std::pow(2.0, -1.5)).epsilon(1e-12));
    CHECK(a.mean_s12 == a.mean_s21);
    CHECK(a.mean_s11 == 1.0);

    const GainModel b = gains_from_pathloss({1.0, 3.0, 0.0}, 0.01);
    CHECK(b.mean_s12 == Catch::Approx(1.0));

    const GainModel c = gains_from_pathloss({2.0, 2.0, 3.0}, 0.01);
    CHECK(c.mean_s12 == Catch::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("gain sampling is deterministic per seed and substream") {
    GainModel model;
    model.mean_s11 = 1.0;
    model.mean_s22 = 2.0;
    model.mean_s12 = 0.5;
    model.mean_s21 = 0.25;
    model.noise_power = 0.1;

    GainSampler a(model, 42), b(model, 42), c(model, 42, 1);
    bool diverged = false;
    for (int i = 0; i < 100; ++i) {
        const BlockGains ga = a.next(), gb = b.next(), gc = c.next();
        CHECK(ga.s11 == gb.s11);
        CHECK(ga.s12 == gb.s12);
        CHECK(ga.s21 == gb.s21);
        CHECK(ga.s22 == gb.s22);
        CHECK(ga.s11 > 0.0);
        diverged = diverged || ga.s11 != gc.s11;
    }
    CHECK(diverged);
}

TEST_CASE("sampled gains follow the exponential law") {
    GainModel model;
    model.noise_power = 1.0;
    GainSampler sampler(model, 7);
    const long n = 1'000'000;
    double sum = 0.0;
    long above_mean = 0;
    for (long i = 0; i < n; ++i) {
        const double s = sampler.next().s11;
        sum += s;
        if (s > 1.0) ++above_mean;
    }
    CHECK(sum / n == Catch::Approx(1.0).margin(0.003));
    CHECK(static_cast<double>(above_mean) / n ==
          Catch::Approx(std::exp(-1.0)).margin(0.002));
}

TEST_CASE("alpha and beta samples match the ratio law (KS)") {
    GainModel model;
    model.mean_s11 = 1.0;
    model.mean_s21 = 0.03;
    model.mean_s22 = 1.0;
    model.mean_s12 = 0.03;
    model.noise_power = 0.01;

    GainSampler sampler(model, 2024);
    const long n = 1'000'000;
    std::vector<double> alpha(n), beta(n);
    for (long i = 0; i < n; ++i) {
        const BlockGains g = sampler.next();
        alpha[static_cast<size_t>(i)] = g.alpha();
        beta[static_cast<size_t>(i)] = g.beta();
    }
    auto ks = [&](std::vector<double>& xs, double q1m, double q2m) {
        std::sort(xs.begin(), xs.end());
        double d = 0.0;
        for (size_t i = 0; i < xs.size(); ++i) {
            const double c = ratio_cdf(xs[i], 1.0, 1.0, 0.0, q1m, q2m);
            const double lo = static_cast<double>(i) / xs.size();
            const double hi = static_cast<double>(i + 1) / xs.size();
            d = std::max(d, std::max(std::fabs(c - lo), std::fabs(c - hi)));
        }
        return d;
    };
    CHECK(ks(alpha, model.mean_s11, model.mean_s21) < 0.002);
    CHECK(ks(beta, model.mean_s22, model.mean_s12) < 0.002);
}

TEST_CASE("sampled ratio histogram tracks the density") {
    // y = x1/(x2 + 1), unit means
    GainModel model;
    model.noise_power = 1.0;
    GainSampler sampler(model, 99);
    const long n = 1'000'000;
    const int bins = 40;
    const double width = 0.25;
    std::vector<long> hist(bins, 0);
    for (long i = 0; i < n; ++i) {
        const BlockGains g = sampler.next();
        const double y = g.s11 / (g.s12 + 1.0);
        const int b = static_cast<int>(y / width);
        if (b >= 0 && b < bins) ++hist[static_cast<size_t>(b)];
    }
    for (int b = 0; b < bins; ++b) {
        const double lo = b * width, hi = lo + width;
        const double p = ratio_cdf(hi, 1.0, 1.0, 1.0, 1.0, 1.0) -
                         ratio_cdf(lo, 1.0, 1.0, 1.0, 1.0, 1.0);
        const double sigma = std::sqrt(p * (1.0 - p) / n);
        CHECK(std::fabs(static_cast<double>(hist[static_cast<size_t>(b)]) / n -
                        p) <= 4.0 * sigma + 1e-9);
    }
}

TEST_CASE("product and radial distribution laws") {
    const double A = 1.0 / 0.03, B = 1.0 / 0.03;

    SECTION("closed forms match direct numerical integration") {
        for (double z : {5.0, 300.0, A * B, 4000.0, 50000.0}) {
            auto f = [&](double b) {
                const double az = z / b;
                return (az / (A + az)) * B / ((B + b) * (B + b));
            };
            const double direct = integrate_upto_inf(f, 0.0, kInf, 1e-10).value;
            CHECK(product_cdf(z, A, B) == Catch::Approx(direct).margin(1e-8));
        }
        for (double w : {0.01, 0.4, B / A, 3.0, 250.0}) {
            auto f = [&](double a) {
                const double bw = w * a;
                return (bw / (B + bw)) * A / ((A + a) * (A + a));
            };
            const double direct = integrate_upto_inf(f, 0.0, kInf, 1e-10).value;
            CHECK(radial_cdf(w, A, B) == Catch::Approx(direct).margin(1e-8));
        }
    }

    SECTION("medians sit at the scale products") {
        CHECK(product_cdf(A * B, A, B) == Catch::Approx(0.5).margin(1e-9));
        CHECK(radial_cdf(B / A, A, B) == Catch::Approx(0.5).margin(1e-9));
    }

    SECTION("series guard joins the closed form smoothly") {
        const double ab = A * B;
        CHECK(product_cdf(ab * (1.0 + 5e-8), A, B) ==
              Catch::Approx(product_cdf(ab * (1.0 + 2e-7), A, B)).margin(1e-7));
        CHECK(radial_cdf((B / A) * (1.0 - 5e-8), A, B) ==
              Catch::Approx(radial_cdf((B / A) * (1.0 - 2e-7), A, B)).margin(1e-7));
    }

    SECTION("quantiles invert the cdfs") {
        for (double p : {0.05, 0.3, 0.5, 0.9, 0.99}) {
            CHECK(product_cdf(product_quantile(p, A, B), A, B) ==
                  Catch::Approx(p).margin(1e-10));
            CHECK(radial_cdf(radial_quantile(p, A, B), A, B) ==
                  Catch::Approx(p).margin(1e-10));
        }
    }

    SECTION("empirical product and radial laws agree") {
        GainModel model;
        model.mean_s21 = 0.03;
        model.mean_s12 = 0.03;
        model.noise_power = 0.01;
        GainSampler sampler(model, 5);
        const long n = 200'000;
        long prod_below = 0, rad_below = 0;
        const double z0 = 500.0, w0 = 2.0;
        for (long i = 0; i < n; ++i) {
            const BlockGains g = sampler.next();
            if (g.alpha() * g.beta() <= z0) ++prod_below;
            if (g.beta() / g.alpha() <= w0) ++rad_below;
        }
        const double pz = product_cdf(z0, A, B);
        const double pw = radial_cdf(w0, A, B);
        CHECK(std::fabs(static_cast<double>(prod_below) / n - pz) <=
              3.0 * std::sqrt(pz * (1 - pz) / n));
        CHECK(std::fabs(static_cast<double>(rad_below) / n - pw) <=
              3.0 * std::sqrt(pw * (1 - pw) / n));
    }
}
