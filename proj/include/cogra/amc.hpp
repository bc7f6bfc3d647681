#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace cogra {

/// One adaptive modulation-and-coding transmission mode. Mode 0 is the
/// outage mode: rate 0, no BER fit constants.
struct AmcMode {
    int index = 0;
    double rate = 0.0;       // spectral efficiency, bits/s/Hz
    double fit_a = 0.0;      // BER fit amplitude
    double fit_slope = 0.0;  // BER fit exponent, per unit linear SNIR
};

/// Target instantaneous bit error rate.
struct BerTarget {
    double value;

    explicit BerTarget(double v) : value(v) {
        if (!(v > 0.0) || !(v < 1.0))
            throw std::invalid_argument("BER target must lie in (0, 1)");
    }
};

/// Ordered mode table: rates strictly increase with the mode index and
/// mode 0 is the implicit outage mode.
class AmcTable {
public:
    /// Build from per-mode (rate, fit_a, fit_slope) triples for modes
    /// 1..N; mode 0 is added implicitly.
    explicit AmcTable(const std::vector<std::array<double, 3>>& positive_modes) {
        if (positive_modes.empty())
            throw std::invalid_argument("AMC table needs at least one positive mode");
        modes_.push_back(AmcMode{0, 0.0, 0.0, 0.0});
        int n = 1;
        double prev_rate = 0.0;
        for (const auto& m : positive_modes) {
            if (!(m[0] > prev_rate))
                throw std::invalid_argument(
                    "AMC rates must be strictly increasing from 0 (mode " +
                    std::to_string(n) + ")");
            if (!(m[1] > 0.0) || !(m[2] > 0.0))
                throw std::invalid_argument(
                    "AMC fit constants must be positive (mode " +
                    std::to_string(n) + ")");
            modes_.push_back(AmcMode{n, m[0], m[1], m[2]});
            prev_rate = m[0];
            ++n;
        }
    }

    int max_mode() const { return static_cast<int>(modes_.size()) - 1; }
    const AmcMode& mode(int n) const { return modes_.at(static_cast<size_t>(n)); }
    double rate(int n) const { return modes_.at(static_cast<size_t>(n)).rate; }
    double max_rate() const { return modes_.back().rate; }

private:
    std::vector<AmcMode> modes_;
};

/// Fitted BER of a transmission mode at linear SNIR gamma.
inline double ber_probability(double gamma, const AmcMode& mode) {
    if (mode.index == 0)
        throw std::invalid_argument("mode 0 is outage; BER undefined");
    if (!(gamma >= 0.0))
        throw std::invalid_argument("SNIR must be nonnegative");
    return mode.fit_a * std::exp(-mode.fit_slope * gamma);
}

/// Minimum linear SNIR at which the mode meets the BER target.
inline double snir_threshold(const AmcMode& mode, const BerTarget& target) {
    if (mode.index == 0)
        throw std::invalid_argument("mode 0 is outage; no SNIR threshold");
    if (target.value > mode.fit_a) {
        char msg[128];
        std::snprintf(msg, sizeof(msg),
                      "BER target %g exceeds fit amplitude %g of mode %d "
                      "(threshold would be negative)",
                      target.value, mode.fit_a, mode.index);
        throw std::invalid_argument(msg);
    }
    return -std::log(target.value / mode.fit_a) / mode.fit_slope;
}

/// SNIR thresholds for every mode of the table at one BER target.
/// Entry 0 is 0 (outage mode carries no threshold and no power) and the
/// remaining entries must be strictly increasing; downstream code keeps
/// this vector around instead of recomputing per call.
inline std::vector<double> snir_thresholds(const AmcTable& table,
                                           const BerTarget& target) {
    std::vector<double> g(static_cast<size_t>(table.max_mode()) + 1, 0.0);
    for (int n = 1; n <= table.max_mode(); ++n) {
        g[static_cast<size_t>(n)] = snir_threshold(table.mode(n), target);
        if (g[static_cast<size_t>(n)] <= g[static_cast<size_t>(n - 1)])
            throw std::invalid_argument(
                "SNIR thresholds are not strictly increasing at mode " +
                std::to_string(n));
    }
    return g;
}

/// Largest mode whose threshold is met by the given SNIR (0 = outage).
inline int mode_from_snir(double snir, const std::vector<double>& thresholds) {
    int n = static_cast<int>(thresholds.size()) - 1;
    while (n > 0 && thresholds[static_cast<size_t>(n)] > snir) --n;
    return n;
}

struct ConvexityReport {
    bool pass = true;
    // first violating triple, in (n, b, c) scan order
    int n = -1, b = -1, c = -1;
};

/// Checks that threshold-vs-rate slopes are nondecreasing:
///   (g(Rn)-g(Rn-b))/(Rn-Rn-b) >= (g(Rn-b)-g(Rn-b-c))/(Rn-b-Rn-b-c)
/// for all b, c >= 1, including the extension through (R0, g0) = (0, 0)
/// that covers the release of all power when a link falls silent. This
/// is the precondition for the greedy power-reduction ordering.
inline ConvexityReport threshold_convexity_check(const AmcTable& table,
                                                 const BerTarget& target) {
    const std::vector<double> g = snir_thresholds(table, target);
    const int top = table.max_mode();
    for (int n = 2; n <= top; ++n) {
        for (int b = 1; b <= n - 1; ++b) {
            for (int c = 1; c <= n - b; ++c) {
                const double hi = (g[n] - g[n - b]) /
                                  (table.rate(n) - table.rate(n - b));
                const double lo = (g[n - b] - g[n - b - c]) /
                                  (table.rate(n - b) - table.rate(n - b - c));
                if (hi < lo) return ConvexityReport{false, n, b, c};
            }
        }
    }
    return ConvexityReport{};
}

/// Default eight-mode table with IEEE 802.11a rates. The fit constants
/// come from fitting the exponential BER model to coded-QAM AWGN
/// waterfall curves; treat them as configuration data, not physics.
inline AmcTable default_80211a_table() {
    return AmcTable({{0.50, 48.6, 9.745},
                     {0.75, 57.1, 6.223},
                     {1.00, 63.9, 4.414},
                     {1.50, 60.3, 2.199},
                     {2.00, 55.4, 1.2324},
                     {3.00, 52.8, 0.4899},
                     {4.00, 49.7, 0.1942}});
}

}  // namespace cogra
