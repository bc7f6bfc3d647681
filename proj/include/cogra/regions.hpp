#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <utility>
#include <vector>

#include "cogra/amc.hpp"
#include "cogra/errors.hpp"
#include "cogra/fading.hpp"
#include "cogra/parallel.hpp"
#include "cogra/quadrature.hpp"

namespace cogra {

/// One cell of the alpha-beta plane partition. Product and radial
/// ranges are half-open; upper edges may be infinite.
struct Region {
    int index = 0;
    int band = 0;    // product-range slot
    int radial = 0;  // beta/alpha slot
    double t_low = 0.0, t_high = kInf;  // alpha*beta range
    double w_low = 0.0, w_high = kInf;  // beta/alpha range
    double mass = 0.0;                  // pr(i)
    double norm_power = 0.0;            // p(i) = E[1/beta | region]
    bool power_divergent = false;
    bool reachable = true;  // mass above the floor
    double idle_primary_rate = 0.0;
    std::vector<std::pair<int, int>> rate_set;  // admissible (k1, k2) modes
};

struct GridOptions {
    double quad_tol = 1e-8;     // absolute, per region integral
    double mass_floor = 1e-12;  // below this a region is unreachable
    double power_guard = 1e12;  // normalized power above this is divergent
    int max_regions = 200000;
    int workers = 0;  // 0 = hardware concurrency
};

struct RegionGrid {
    std::vector<double> product_boundaries;  // Z: 0, threshold products, inf
    std::vector<double> aux_products;        // Z' subdivision values
    std::vector<double> product_edges;       // Z and Z' merged, size C+1
    std::vector<double> radial_edges;        // W, size L+1
    int band_count = 0;    // C
    int radial_count = 0;  // L
    std::vector<Region> regions;  // size C*L, index = band*L + radial
    std::vector<double> g1, g2;   // SNIR thresholds the grid was built for
    GainModel model;
    double p1 = 1.0;

    int total() const { return static_cast<int>(regions.size()); }
};

struct RegionMassPower {
    double mass = 0.0;
    double power_raw = 0.0;  // unnormalized: integral of (1/beta) over cell
    bool divergent = false;
};

/// The two Appendix-style cell integrals in the substituted coordinates
/// x^2 = alpha*beta, y^2 = beta/alpha. The power integral diverges
/// logarithmically when the cell touches the origin in both coordinates.
inline RegionMassPower region_mass_and_power(double t_low, double t_high,
                                             double w_low, double w_high,
                                             double A, double B,
                                             double tol = 1e-8,
                                             double power_guard = 1e12) {
    if (!(A > 0.0) || !(B > 0.0))
        throw std::invalid_argument("gain ratio scales must be positive");
    if (!(t_low >= 0.0) || !(w_low >= 0.0) || !(t_high > t_low) ||
        !(w_high > w_low))
        throw std::invalid_argument("bad region bounds");

    const double x_lo = std::sqrt(t_low), x_hi = std::sqrt(t_high);
    const double y_lo = std::sqrt(w_low), y_hi = std::sqrt(w_high);

    RegionMassPower out;
    auto mass_f = [A, B](double x, double y) {
        const double u = A * y + x;
        const double v = B + x * y;
        return 2.0 * A * B * x * y / (u * u * v * v);
    };
    out.mass = integrate2d_checked(mass_f, x_lo, x_hi, y_lo, y_hi, tol,
                                   "region mass");

    if (t_low == 0.0 && w_low == 0.0) {
        // E[1/beta] has a log singularity at the origin corner
        out.divergent = true;
        out.power_raw = kInf;
        return out;
    }
    auto power_f = [A, B](double x, double y) {
        const double u = A * y + x;
        const double v = B + x * y;
        return 2.0 * A * B / (u * u * v * v);
    };
    out.power_raw = integrate2d_checked(power_f, x_lo, x_hi, y_lo, y_hi, tol,
                                        "region power");
    if (out.mass > 0.0 && out.power_raw / out.mass > power_guard) {
        out.divergent = true;
        out.power_raw = kInf;
    }
    return out;
}

/// Admissible (primary, cognitive) mode pairs of a band with lower
/// product edge t_low: the silent option (0,0), the primary-outage
/// pairs (0,m), and every positive pair whose threshold product fits
/// under t_low. Band edges never split a threshold product, so the
/// lower edge decides exactly.
inline std::vector<std::pair<int, int>> permissible_rate_set(
    double t_low, const std::vector<double>& g1, const std::vector<double>& g2) {
    std::vector<std::pair<int, int>> set;
    const int n1 = static_cast<int>(g1.size()) - 1;
    const int n2 = static_cast<int>(g2.size()) - 1;
    for (int m = 0; m <= n2; ++m) set.emplace_back(0, m);
    for (int n = 1; n <= n1; ++n)
        for (int m = 1; m <= n2; ++m)
            if (g1[static_cast<size_t>(n)] * g2[static_cast<size_t>(m)] <= t_low)
                set.emplace_back(n, m);
    return set;
}

namespace detail {

// closed form of the inner integral over s11: int_{s1}^{s2} s e^{-s c} ds
inline double s11_segment(double c, double s1, double s2) {
    auto antideriv = [c](double s) {  // (s c + 1) exp(-s c)
        if (std::isinf(s)) return 0.0;
        const double sc = s * c;
        if (sc > 700.0) return 0.0;
        return (sc + 1.0) * std::exp(-sc);
    };
    return (antideriv(s1) - antideriv(s2)) / (c * c);
}

}  // namespace detail

/// Conditional probability that p1*s11/n0 lands in [v_lo, v_hi) while
/// (alpha, beta) lies in the given cell, times pr(i)^-1 left to the
/// caller: returns the joint (unconditional) probability. Uses the
/// joint density of (alpha, s11) and the independence of beta.
inline double idle_mode_cell_probability(double t_low, double t_high,
                                         double w_low, double w_high,
                                         const GainModel& model, double p1,
                                         double v_lo, double v_hi,
                                         double tol = 1e-8) {
    const double A = model.alpha_scale();
    const double B = model.beta_scale();
    const double s11m = model.mean_s11;
    const double s21m = model.mean_s21;
    const double s1 = v_lo * model.noise_power / p1;
    const double s2 = v_hi * model.noise_power / p1;

    auto f = [=](double x, double y) {
        const double c = 1.0 / s11m + y / (s21m * x);
        const double v = B + x * y;
        return (2.0 * y / x) / (s11m * s21m) * (B / (v * v)) *
               detail::s11_segment(c, s1, s2);
    };
    return integrate2d_checked(f, std::sqrt(t_low), std::sqrt(t_high),
                               std::sqrt(w_low), std::sqrt(w_high), tol,
                               "idle primary mode probability");
}

/// Average primary spectral efficiency over a cell when the cognitive
/// link is silent: the primary adapts on its own SNR p1*s11/n0 with the
/// usual threshold intervals, conditioned on the cell.
inline double idle_primary_rate(const Region& region, const AmcTable& table,
                                const std::vector<double>& g1,
                                const GainModel& model, double p1,
                                double tol = 1e-8) {
    if (!(region.mass > 0.0))
        throw std::invalid_argument(
            "idle primary rate undefined for a region with no mass");
    const int top = table.max_mode();
    double acc = 0.0;
    for (int n = 1; n <= top; ++n) {
        const double v_lo = g1[static_cast<size_t>(n)];
        const double v_hi = n < top ? g1[static_cast<size_t>(n) + 1] : kInf;
        acc += table.rate(n) *
               idle_mode_cell_probability(region.t_low, region.t_high,
                                          region.w_low, region.w_high, model,
                                          p1, v_lo, v_hi, tol);
    }
    return acc / region.mass;
}

namespace detail {

inline std::vector<double> sorted_threshold_products(
    const std::vector<double>& g1, const std::vector<double>& g2) {
    std::vector<double> prod;
    for (size_t n = 1; n < g1.size(); ++n)
        for (size_t m = 1; m < g2.size(); ++m) prod.push_back(g1[n] * g2[m]);
    std::sort(prod.begin(), prod.end());
    std::vector<double> out;
    for (double z : prod)
        if (out.empty() || z > out.back() * (1.0 + 1e-12)) out.push_back(z);
    return out;
}

// largest-remainder apportionment of `budget` items by weight
inline std::vector<int> apportion_by_weight(const std::vector<double>& weights,
                                            int budget) {
    const size_t k = weights.size();
    std::vector<int> alloc(k, 0);
    if (budget <= 0 || k == 0) return alloc;
    double total = 0.0;
    for (double w : weights) total += std::max(w, 0.0);
    if (total <= 0.0) return alloc;

    std::vector<std::pair<double, size_t>> rema(k);
    int assigned = 0;
    for (size_t i = 0; i < k; ++i) {
        const double share = std::max(weights[i], 0.0) / total * budget;
        alloc[i] = static_cast<int>(std::floor(share));
        assigned += alloc[i];
        rema[i] = {share - std::floor(share), i};
    }
    std::sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (int r = 0; r < budget - assigned; ++r)
        ++alloc[rema[static_cast<size_t>(r) % k].second];
    return alloc;
}

}  // namespace detail

/// Builds the full partition: product boundaries from the threshold
/// products, auxiliary product curves and radial lines at equal
/// probability-mass quantiles, then mass, normalized power, rate set
/// and idle primary rate per region.
inline RegionGrid build_grid(const AmcTable& table, const BerTarget& b1,
                             const BerTarget& b2, const GainModel& model,
                             int radial_count, int band_subdivisions,
                             double p1, const GridOptions& options = {}) {
    validate(model);
    if (radial_count < 1)
        throw std::invalid_argument("radial count must be at least 1");
    if (band_subdivisions < 0)
        throw std::invalid_argument("band subdivision budget must be >= 0");
    if (!(p1 > 0.0)) throw std::invalid_argument("primary power must be positive");

    RegionGrid grid;
    grid.model = model;
    grid.p1 = p1;
    grid.g1 = snir_thresholds(table, b1);
    grid.g2 = snir_thresholds(table, b2);
    grid.radial_count = radial_count;

    const std::vector<double> products =
        detail::sorted_threshold_products(grid.g1, grid.g2);
    grid.product_boundaries.push_back(0.0);
    grid.product_boundaries.insert(grid.product_boundaries.end(),
                                   products.begin(), products.end());
    grid.product_boundaries.push_back(kInf);
    const int bands_m = static_cast<int>(products.size()) + 1;

    grid.band_count = bands_m + band_subdivisions;
    const long v0 = static_cast<long>(grid.band_count) * radial_count;
    if (v0 > options.max_regions) {
        char msg[128];
        std::snprintf(msg, sizeof(msg),
                      "grid of %d x %d = %ld regions exceeds cap %d",
                      grid.band_count, radial_count, v0, options.max_regions);
        throw ResourceError(msg);
    }

    const double A = model.alpha_scale();
    const double B = model.beta_scale();

    grid.radial_edges.push_back(0.0);
    for (int j = 1; j < radial_count; ++j)
        grid.radial_edges.push_back(
            radial_quantile(static_cast<double>(j) / radial_count, A, B));
    grid.radial_edges.push_back(kInf);

    // subdivide bands at equal conditional quantiles of alpha*beta mass,
    // spending the budget where the mass lives
    std::vector<double> band_mass(static_cast<size_t>(bands_m));
    for (int h = 0; h < bands_m; ++h)
        band_mass[static_cast<size_t>(h)] =
            product_cdf(grid.product_boundaries[static_cast<size_t>(h) + 1], A, B) -
            product_cdf(grid.product_boundaries[static_cast<size_t>(h)], A, B);
    const std::vector<int> alloc =
        detail::apportion_by_weight(band_mass, band_subdivisions);

    grid.product_edges.push_back(0.0);
    for (int h = 0; h < bands_m; ++h) {
        const double z_lo = grid.product_boundaries[static_cast<size_t>(h)];
        const double z_hi = grid.product_boundaries[static_cast<size_t>(h) + 1];
        const double p_lo = product_cdf(z_lo, A, B);
        const double p_hi = product_cdf(z_hi, A, B);
        const int cuts = alloc[static_cast<size_t>(h)];
        for (int k = 1; k <= cuts; ++k) {
            const double p = p_lo + (p_hi - p_lo) * k / (cuts + 1);
            const double z = product_quantile(p, A, B);
            if (z > grid.product_edges.back() * (1.0 + 1e-12) &&
                z < z_hi * (1.0 - 1e-12)) {
                grid.product_edges.push_back(z);
                grid.aux_products.push_back(z);
            }
        }
        grid.product_edges.push_back(z_hi);
    }
    grid.band_count = static_cast<int>(grid.product_edges.size()) - 1;

    const int total = grid.band_count * grid.radial_count;
    grid.regions.resize(static_cast<size_t>(total));
    parallel_for(
        total,
        [&](int i) {
            Region& reg = grid.regions[static_cast<size_t>(i)];
            reg.index = i;
            reg.band = i / grid.radial_count;
            reg.radial = i % grid.radial_count;
            reg.t_low = grid.product_edges[static_cast<size_t>(reg.band)];
            reg.t_high = grid.product_edges[static_cast<size_t>(reg.band) + 1];
            reg.w_low = grid.radial_edges[static_cast<size_t>(reg.radial)];
            reg.w_high = grid.radial_edges[static_cast<size_t>(reg.radial) + 1];

            const RegionMassPower mp = region_mass_and_power(
                reg.t_low, reg.t_high, reg.w_low, reg.w_high, A, B,
                options.quad_tol, options.power_guard);
            reg.mass = mp.mass;
            reg.power_divergent = mp.divergent;
            reg.norm_power =
                mp.divergent ? kInf
                             : (mp.mass > 0.0 ? mp.power_raw / mp.mass : 0.0);
            reg.rate_set = permissible_rate_set(reg.t_low, grid.g1, grid.g2);
            reg.reachable = reg.mass >= options.mass_floor;
            reg.idle_primary_rate =
                reg.reachable ? idle_primary_rate(reg, table, grid.g1, model,
                                                  p1, options.quad_tol)
                              : 0.0;
        },
        options.workers);

    return grid;
}

/// Index of the unique region containing (alpha, beta); boundaries
/// resolve upward per the half-open cell convention.
inline int locate_region(double alpha, double beta, const RegionGrid& grid) {
    if (!(alpha > 0.0) || !(beta > 0.0))
        throw std::invalid_argument("modified SNIRs must be positive");
    const double prod = alpha * beta;
    const double rad = beta / alpha;
    const auto band_it = std::upper_bound(grid.product_edges.begin(),
                                          grid.product_edges.end(), prod);
    const auto rad_it = std::upper_bound(grid.radial_edges.begin(),
                                         grid.radial_edges.end(), rad);
    int band = static_cast<int>(band_it - grid.product_edges.begin()) - 1;
    int radial = static_cast<int>(rad_it - grid.radial_edges.begin()) - 1;
    band = std::clamp(band, 0, grid.band_count - 1);
    radial = std::clamp(radial, 0, grid.radial_count - 1);
    return band * grid.radial_count + radial;
}

}  // namespace cogra
