#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/expint.hpp>

#include "cogra/amc.hpp"
#include "cogra/errors.hpp"
#include "cogra/fading.hpp"
#include "cogra/quadrature.hpp"

namespace cogra {

/// Outcome of an idealized interweave evaluation: the primary is active
/// a fraction lambda of the spectrum at boosted power, the cognitive
/// gets the rest interference-free.
struct InterweaveResult {
    bool feasible = false;
    double activity_fraction = 0.0;  // lambda
    double primary_rate = 0.0;
    double cognitive_rate = 0.0;
};

namespace detail {

// primary average rate at activity fraction lambda: boosted power P1/lambda
// on an interference-free exponential link
inline double interweave_primary_avg(double lambda, const AmcTable& table,
                                     const std::vector<double>& v1, double p1,
                                     double mean_s11, double n0) {
    if (lambda <= 0.0) return 0.0;
    auto tail = [&](double v) {
        if (std::isinf(v)) return 0.0;
        return std::exp(-v * lambda * n0 / (p1 * mean_s11));
    };
    double acc = 0.0;
    for (int n = 1; n <= table.max_mode(); ++n) {
        const double hi =
            n < table.max_mode() ? v1[static_cast<size_t>(n) + 1] : kInf;
        acc += table.rate(n) * (tail(v1[static_cast<size_t>(n)]) - tail(hi));
    }
    return lambda * acc;
}

}  // namespace detail

/// Smallest primary activity fraction that still delivers the required
/// primary average rate. The rate is not monotone in lambda, so a dense
/// bracketing grid precedes the bisection.
inline InterweaveResult solve_activity_fraction(const GainModel& model,
                                                const AmcTable& table,
                                                const BerTarget& b1, double p1,
                                                double e1) {
    validate(model);
    if (!(p1 > 0.0)) throw std::invalid_argument("primary power must be positive");
    if (!(e1 >= 0.0)) throw std::invalid_argument("required rate must be >= 0");

    const std::vector<double> v1 = snir_thresholds(table, b1);
    auto k1_of = [&](double lam) {
        return detail::interweave_primary_avg(lam, table, v1, p1,
                                              model.mean_s11,
                                              model.noise_power);
    };

    InterweaveResult out;
    if (e1 == 0.0) {
        out.feasible = true;
        out.activity_fraction = 0.0;
        out.primary_rate = 0.0;
        return out;
    }

    const int grid_points = 1000;
    int hit = -1;
    for (int i = 1; i <= grid_points; ++i) {
        if (k1_of(static_cast<double>(i) / grid_points) >= e1) {
            hit = i;
            break;
        }
    }
    if (hit < 0) return out;  // even full activity falls short

    double lo = static_cast<double>(hit - 1) / grid_points;
    double hi = static_cast<double>(hit) / grid_points;
    while (hi - lo > 1e-9 * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        (k1_of(mid) >= e1 ? hi : lo) = mid;
    }
    out.feasible = true;
    out.activity_fraction = hi;
    out.primary_rate = k1_of(hi);
    return out;
}

/// Cognitive average rate when it fills the idle fraction with constant
/// power (budget concentrated into its share of the spectrum).
inline double interweave_constant_power(const GainModel& model,
                                        const AmcTable& table,
                                        const BerTarget& b2, double lambda,
                                        double p2max) {
    validate(model);
    if (!(lambda >= 0.0) || !(lambda <= 1.0))
        throw std::invalid_argument("activity fraction must lie in [0, 1]");
    if (!(p2max > 0.0)) throw std::invalid_argument("power budget must be positive");
    if (lambda >= 1.0) return 0.0;

    const std::vector<double> v2 = snir_thresholds(table, b2);
    const double share = 1.0 - lambda;
    auto tail = [&](double v) {
        if (std::isinf(v)) return 0.0;
        return std::exp(-v * share * model.noise_power /
                        (p2max * model.mean_s22));
    };
    double acc = 0.0;
    for (int n = 1; n <= table.max_mode(); ++n) {
        const double hi =
            n < table.max_mode() ? v2[static_cast<size_t>(n) + 1] : kInf;
        acc += table.rate(n) * (tail(v2[static_cast<size_t>(n)]) - tail(hi));
    }
    return share * acc;
}

struct AdaptiveInterweaveResult {
    double cognitive_rate = 0.0;
    std::vector<double> thresholds;  // on s22/N0; index 0 unused (0)
    double avg_power = 0.0;          // at the chosen multiplier
    double budget = 0.0;             // average power budget during activity
};

/// Cognitive average rate when the idle fraction is used with the
/// single-link discrete-rate power adaptation optimum: channel
/// inversion per mode cell, cell edges scaled by a Lagrange multiplier
/// tuned until the average power meets the boosted budget.
inline AdaptiveInterweaveResult interweave_adaptive_power(
    const GainModel& model, const AmcTable& table, const BerTarget& b2,
    double lambda, double p2max) {
    validate(model);
    if (!(lambda >= 0.0) || !(lambda < 1.0))
        throw std::invalid_argument("activity fraction must lie in [0, 1)");

    AdaptiveInterweaveResult out;
    const double share = 1.0 - lambda;
    out.budget = p2max / share;
    if (!(out.budget > 0.0)) return out;

    const std::vector<double> g2 = snir_thresholds(table, b2);
    const int top = table.max_mode();
    const double mean = model.mean_s22 / model.noise_power;  // of s22/N0

    // cell edges for multiplier mu; convexity of g2 in rate makes them
    // increasing in n
    auto edges = [&](double mu) {
        std::vector<double> v(static_cast<size_t>(top) + 2, 0.0);
        for (int n = 1; n <= top; ++n)
            v[static_cast<size_t>(n)] =
                mu * (g2[static_cast<size_t>(n)] - g2[static_cast<size_t>(n) - 1]) /
                (table.rate(n) - table.rate(n - 1));
        v[static_cast<size_t>(top) + 1] = kInf;
        return v;
    };
    auto e1_exp = [&](double x) {  // E1 with the x -> inf tail cut off
        return x > 700.0 ? 0.0 : boost::math::expint(1, x);
    };
    auto avg_power = [&](double mu) {
        const std::vector<double> v = edges(mu);
        double acc = 0.0;
        for (int n = 1; n <= top; ++n) {
            const double lo = v[static_cast<size_t>(n)];
            const double hi = v[static_cast<size_t>(n) + 1];
            if (!(hi > lo)) continue;
            acc += g2[static_cast<size_t>(n)] *
                   (e1_exp(lo / mean) - (std::isinf(hi) ? 0.0 : e1_exp(hi / mean))) /
                   mean;
        }
        return acc;
    };
    auto avg_rate = [&](double mu) {
        const std::vector<double> v = edges(mu);
        double acc = 0.0;
        for (int n = 1; n <= top; ++n) {
            const double lo = v[static_cast<size_t>(n)];
            const double hi = v[static_cast<size_t>(n) + 1];
            if (!(hi > lo)) continue;
            acc += table.rate(n) *
                   (std::exp(-lo / mean) -
                    (std::isinf(hi) ? 0.0 : std::exp(-hi / mean)));
        }
        return acc;
    };

    // dual bisection: avg_power decreases from +inf (mu -> 0) to 0
    double mu_lo = 1e-12, mu_hi = 1.0;
    while (avg_power(mu_hi) > out.budget) {
        mu_hi *= 2.0;
        if (mu_hi > 1e300) throw NumericError("dual multiplier bracket overflow");
    }
    while (avg_power(mu_lo) < out.budget) {
        mu_lo *= 0.5;
        if (mu_lo < 1e-300) break;  // budget effectively unconstrained
    }
    for (int it = 0; it < 200 && mu_hi - mu_lo > 1e-13 * mu_hi; ++it) {
        const double mid = 0.5 * (mu_lo + mu_hi);
        (avg_power(mid) > out.budget ? mu_lo : mu_hi) = mid;
    }
    const double mu = 0.5 * (mu_lo + mu_hi);

    out.thresholds = edges(mu);
    out.thresholds.pop_back();  // drop the infinite sentinel
    out.avg_power = avg_power(mu);
    out.cognitive_rate = share * avg_rate(mu);
    if (out.cognitive_rate <= 0.0) {
        out.cognitive_rate = 0.0;
        out.thresholds.clear();
    }
    return out;
}

}  // namespace cogra
