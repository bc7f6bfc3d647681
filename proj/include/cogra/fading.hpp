#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "cogra/errors.hpp"

namespace cogra {

/// Mean linear power gains of the two direct and two cross links plus
/// the AWGN power. alpha/beta scales are the parameters of the modified
/// SNIR laws alpha = s11/s21 and beta = s22/s12.
struct GainModel {
    double mean_s11 = 1.0;
    double mean_s22 = 1.0;
    double mean_s12 = 1.0;
    double mean_s21 = 1.0;
    double noise_power = 1.0;

    double alpha_scale() const { return mean_s11 / mean_s21; }
    double beta_scale() const { return mean_s22 / mean_s12; }
};

inline void validate(const GainModel& m) {
    if (!(m.mean_s11 > 0.0) || !(m.mean_s22 > 0.0) || !(m.mean_s12 > 0.0) ||
        !(m.mean_s21 > 0.0))
        throw std::invalid_argument("mean channel gains must be positive");
    if (!(m.noise_power > 0.0))
        throw std::invalid_argument("noise power must be positive");
}

/// Large scale path-loss geometry: transceiver pairs sit on the corners
/// of a normalized rectangle with unit direct-link distance and
/// transmitter separation d, so cross distances are sqrt(1 + d^2).
struct PathLossGeometry {
    double s0 = 1.0;
    double exponent = 3.0;
    double tx_separation = 1.0;
};

inline GainModel gains_from_pathloss(const PathLossGeometry& geo,
                                     double noise_power) {
    if (!(geo.s0 > 0.0)) throw std::invalid_argument("path-loss s0 must be positive");
    if (!(geo.exponent > 0.0))
        throw std::invalid_argument("path-loss exponent must be positive");
    if (!(geo.tx_separation >= 0.0))
        throw std::invalid_argument("transmitter separation must be nonnegative");
    const double d2 = geo.tx_separation * geo.tx_separation;
    const double cross = geo.s0 / std::pow(1.0 + d2, geo.exponent / 2.0);
    GainModel m;
    m.mean_s11 = geo.s0;
    m.mean_s22 = geo.s0;
    m.mean_s12 = cross;
    m.mean_s21 = cross;
    m.noise_power = noise_power;
    validate(m);
    return m;
}

namespace detail {
inline void check_ratio_args(double y0, double q1, double q2, double q3,
                             double mean1, double mean2) {
    if (!(q1 > 0.0) || !(q2 > 0.0) || !(mean1 > 0.0) || !(mean2 > 0.0))
        throw std::invalid_argument("ratio law scales and means must be positive");
    if (!(q3 >= 0.0)) throw std::invalid_argument("ratio law offset must be nonnegative");
    if (!(y0 >= 0.0)) throw std::invalid_argument("ratio law argument must be nonnegative");
}
}  // namespace detail

/// Density at y0 of y = q1*x1 / (q2*x2 + q3) for independent exponential
/// x1, x2 with the given means.
inline double ratio_pdf(double y0, double q1, double q2, double q3,
                        double mean1, double mean2) {
    detail::check_ratio_args(y0, q1, q2, q3, mean1, mean2);
    const double r = y0 * q2 / (mean1 * q1);          // 1/x2-units slope
    const double im2 = 1.0 / mean2;
    const double expo = std::exp(-y0 * q3 / (mean1 * q1));
    const double head = (q3 / (mean1 * q1)) * im2 / (im2 + r);
    const double tail = (q2 / (mean1 * q1)) * im2 / ((im2 + r) * (im2 + r));
    return (head + tail) * expo;
}

/// CDF companion of ratio_pdf.
inline double ratio_cdf(double y0, double q1, double q2, double q3,
                        double mean1, double mean2) {
    detail::check_ratio_args(y0, q1, q2, q3, mean1, mean2);
    const double r = y0 * q2 / (mean1 * q1);
    const double im2 = 1.0 / mean2;
    return 1.0 - std::exp(-y0 * q3 / (mean1 * q1)) * im2 / (im2 + r);
}

/// P(alpha*beta <= z) for alpha, beta independent with CDFs
/// a/(A+a) and b/(B+b). Closed form with a series guard at z = A*B.
inline double product_cdf(double z, double A, double B) {
    if (!(A > 0.0) || !(B > 0.0)) throw std::invalid_argument("scales must be positive");
    if (z <= 0.0) return 0.0;
    if (std::isinf(z)) return 1.0;
    const double ab = A * B;
    const double u = z - ab;
    if (std::fabs(u) <= 1e-7 * ab) return 0.5 + u / (6.0 * ab);
    return z * ab * std::log(ab / z) / (u * u) + z / u;
}

/// P(beta/alpha <= w) for the same pair of ratio laws.
inline double radial_cdf(double w, double A, double B) {
    if (!(A > 0.0) || !(B > 0.0)) throw std::invalid_argument("scales must be positive");
    if (w <= 0.0) return 0.0;
    if (std::isinf(w)) return 1.0;
    const double u = A * w - B;
    if (std::fabs(u) <= 1e-7 * B) return 0.5 + u / (6.0 * B);
    return 1.0 + B / u - A * B * w * std::log(A * w / B) / (u * u);
}

namespace detail {
template <class Cdf>
double invert_monotone_cdf(const Cdf& cdf, double p, double hint) {
    // bracket then bisect; cdf is continuous and strictly increasing
    double lo = 0.0, hi = hint;
    while (cdf(hi) < p) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) throw NumericError("cdf quantile bracket overflow");
    }
    for (int it = 0; it < 200 && (hi - lo) > 1e-14 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}
}  // namespace detail

inline double product_quantile(double p, double A, double B) {
    if (!(p > 0.0) || !(p < 1.0))
        throw std::invalid_argument("quantile probability must lie in (0,1)");
    return detail::invert_monotone_cdf(
        [A, B](double z) { return product_cdf(z, A, B); }, p, A * B);
}

inline double radial_quantile(double p, double A, double B) {
    if (!(p > 0.0) || !(p < 1.0))
        throw std::invalid_argument("quantile probability must lie in (0,1)");
    return detail::invert_monotone_cdf(
        [A, B](double w) { return radial_cdf(w, A, B); }, p, B / A);
}

/// Linear power gains of the four links for one fading block.
struct BlockGains {
    double s11, s12, s21, s22;

    double alpha() const { return s11 / s21; }
    double beta() const { return s22 / s12; }
};

/// Seeded sampler drawing one set of independent exponential gains per
/// block. Each gain component owns its stream, so adding a consumer of
/// one component never perturbs the draw sequence of another, and
/// distinct substreams stay disjoint for parallel workers.
class GainSampler {
public:
    GainSampler(const GainModel& model, std::uint64_t seed,
                std::uint64_t substream = 0)
        : means_{model.mean_s11, model.mean_s12, model.mean_s21,
                 model.mean_s22} {
        validate(model);
        for (std::uint64_t c = 0; c < 4; ++c) {
            std::seed_seq sseq{seed, substream, c};
            engines_[c].seed(sseq);
        }
    }

    BlockGains next() {
        return BlockGains{draw(0) * means_[0], draw(1) * means_[1],
                          draw(2) * means_[2], draw(3) * means_[3]};
    }

private:
    // unit-mean exponential via inverse CDF on u in (0,1); the half-ulp
    // offset keeps draws strictly positive and finite
    double draw(int c) {
        const std::uint64_t bits = engines_[static_cast<size_t>(c)]();
        const double u = (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
        return -std::log(u);
    }

    std::array<std::mt19937_64, 4> engines_;
    std::array<double, 4> means_;
};

}  // namespace cogra
