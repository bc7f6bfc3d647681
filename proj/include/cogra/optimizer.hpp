#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "cogra/amc.hpp"
#include "cogra/fading.hpp"
#include "cogra/regions.hpp"

namespace cogra {

/// Problem constants: required primary average rate, fixed primary
/// power, cognitive average power budget, BER targets and the design
/// margin applied to them (thresholds are designed for target/margin to
/// absorb the neglected thermal noise).
struct ProblemSpec {
    double required_primary_rate = 0.0;  // E1
    double primary_power = 1.0;          // P1
    double cognitive_power_budget = 1.0; // P2max
    double b1 = 1e-5;
    double b2 = 1e-5;
    double margin = 2.0;  // kappa >= 1

    BerTarget design_b1() const { return BerTarget(b1 / margin); }
    BerTarget design_b2() const { return BerTarget(b2 / margin); }
};

inline void validate(const ProblemSpec& s) {
    if (!(s.required_primary_rate >= 0.0))
        throw std::invalid_argument("required primary rate must be >= 0");
    if (!(s.primary_power > 0.0))
        throw std::invalid_argument("primary power must be positive");
    if (!(s.cognitive_power_budget > 0.0))
        throw std::invalid_argument("cognitive power budget must be positive");
    if (!(s.margin >= 1.0))
        throw std::invalid_argument("design margin must be >= 1");
    (void)BerTarget(s.b1);
    (void)BerTarget(s.b2);
}

/// Per-region cognitive mode choice with the implied primary modes and
/// the analytic averages of the resulting policy.
struct PolicyAssignment {
    std::vector<int> k2_mode;
    std::vector<int> k1_mode;  // implied; meaningful where k2_mode > 0
    double k1avg = 0.0, k2avg = 0.0, p2avg = 0.0;
    bool feasible = false;
    long iterations = 0;
    // spread of the rate-effective benefit ratios at the final state;
    // equal values across regions are the optimality condition
    double d1_min = 0.0, d1_max = 0.0;
};

/// Largest primary mode whose threshold product with the cognitive mode
/// fits under the band's lower product edge; 0 means primary outage.
inline int implied_primary_mode(double t_low, int k2_mode,
                                const std::vector<double>& g1,
                                const std::vector<double>& g2) {
    if (k2_mode < 1) throw std::invalid_argument("cognitive mode must be >= 1");
    const double gc = g2[static_cast<size_t>(k2_mode)];
    int best = 0;
    for (int n = 1; n < static_cast<int>(g1.size()); ++n)
        if (g1[static_cast<size_t>(n)] * gc <= t_low) best = n;
    return best;
}

struct DecisionVars {
    double d1 = 0.0;
    double d2_one = 0.0;  // d2(i, 1)
    double d3 = 0.0;
    int t = 0;  // minimal rate-raising decrement; 0 = undefined
};

namespace detail {

// primary rate earned in region i when the cognitive mode is m; the
// silent case falls back to the idle average
inline double primary_rate_value(const Region& reg, int m,
                                 const AmcTable& table,
                                 const std::vector<double>& g1,
                                 const std::vector<double>& g2) {
    if (m == 0) return reg.idle_primary_rate;
    return table.rate(implied_primary_mode(reg.t_low, m, g1, g2));
}

}  // namespace detail

/// The three greedy decision variables of a region at cognitive mode m.
/// All zero when the region is silent, unreachable or power-divergent.
inline DecisionVars decision_variables(const Region& reg, int m,
                                       const AmcTable& table,
                                       const std::vector<double>& g1,
                                       const std::vector<double>& g2) {
    DecisionVars dv;
    if (m <= 0 || !reg.reachable || !(reg.mass > 0.0)) return dv;
    if (reg.power_divergent)
        throw std::logic_error(
            "decision variables queried on a power-divergent region with "
            "an active cognitive mode");

    const double k1_now = detail::primary_rate_value(reg, m, table, g1, g2);
    for (int x = 1; x <= m; ++x) {
        if (detail::primary_rate_value(reg, m - x, table, g1, g2) > k1_now) {
            dv.t = x;
            break;
        }
    }

    const double gm = g2[static_cast<size_t>(m)];
    dv.d2_one = (gm - g2[static_cast<size_t>(m) - 1]) * reg.norm_power /
                (table.rate(m) - table.rate(m - 1));

    const int k1_mode_now = implied_primary_mode(reg.t_low, m, g1, g2);
    const bool at_top = k1_mode_now == static_cast<int>(g1.size()) - 1;
    if (!at_top && dv.t > 0) {
        const double k1_next =
            detail::primary_rate_value(reg, m - dv.t, table, g1, g2);
        const double dr = table.rate(m) - table.rate(m - dv.t);
        dv.d1 = (k1_next - k1_now) / dr;
        dv.d3 = (gm - g2[static_cast<size_t>(m - dv.t)]) * reg.norm_power / dr;
    }
    return dv;
}

/// Analytic averages of a per-region cognitive mode assignment.
inline std::array<double, 3> policy_averages(const std::vector<int>& k2_mode,
                                             const RegionGrid& grid,
                                             const AmcTable& table,
                                             double p1) {
    if (k2_mode.size() != grid.regions.size())
        throw std::invalid_argument("policy size does not match grid");
    double k1 = 0.0, k2 = 0.0, p2 = 0.0;
    for (size_t i = 0; i < k2_mode.size(); ++i) {
        const Region& reg = grid.regions[i];
        const int m = k2_mode[i];
        if (m > 0 && reg.power_divergent)
            throw std::logic_error(
                "active cognitive mode on a power-divergent region");
        k2 += table.rate(m) * reg.mass;
        k1 += detail::primary_rate_value(reg, m, table, grid.g1, grid.g2) *
              reg.mass;
        if (m > 0)
            p2 += p1 * grid.g2[static_cast<size_t>(m)] * reg.norm_power *
                  reg.mass;
    }
    return {k1, k2, p2};
}

/// Optional per-iteration record of the greedy run, for diagnostics and
/// trajectory tests.
struct GreedyStep {
    int part = 0;  // 1, 2 or 3
    int region = -1;
    int from_mode = 0, to_mode = 0;
    double decision_value = 0.0;
    double k1avg = 0.0, k2avg = 0.0, p2avg = 0.0;
};

struct GreedyTrace {
    std::vector<GreedyStep> steps;
};

namespace detail {

inline bool rates_thresholds_convex(const AmcTable& table,
                                    const std::vector<double>& g) {
    const int top = static_cast<int>(g.size()) - 1;
    for (int n = 2; n <= top; ++n)
        for (int b = 1; b <= n - 1; ++b)
            for (int c = 1; c <= n - b; ++c) {
                const double hi =
                    (g[n] - g[n - b]) / (table.rate(n) - table.rate(n - b));
                const double lo = (g[n - b] - g[n - b - c]) /
                                  (table.rate(n - b) - table.rate(n - b - c));
                if (hi < lo) return false;
            }
    return true;
}

}  // namespace detail

/// Greedy rate assignment: start every region at the top cognitive mode
/// and take minimal decrements, steered by the decision variables,
/// until both constraints hold (feasible) or no useful change is left
/// (infeasible). Ties at the argmax go to the lowest region index.
inline PolicyAssignment greedy_optimize(const RegionGrid& grid,
                                        const ProblemSpec& spec,
                                        const AmcTable& table,
                                        GreedyTrace* trace = nullptr) {
    validate(spec);
    const int region_count = grid.total();
    const int top = table.max_mode();
    const double eps = 1e-9;
    const double e1 = spec.required_primary_rate;
    const double p2max = spec.cognitive_power_budget;
    const double p1 = spec.primary_power;

    if (!detail::rates_thresholds_convex(table, grid.g2))
        std::fprintf(stderr,
                     "warning: cognitive thresholds are not convex in rate; "
                     "greedy near-optimality is unproven for this table\n");

    PolicyAssignment out;
    out.k2_mode.assign(static_cast<size_t>(region_count), 0);
    out.k1_mode.assign(static_cast<size_t>(region_count), 0);
    for (int i = 0; i < region_count; ++i) {
        const Region& reg = grid.regions[static_cast<size_t>(i)];
        if (reg.reachable && !reg.power_divergent && reg.mass > 0.0) {
            out.k2_mode[static_cast<size_t>(i)] = top;
            out.k1_mode[static_cast<size_t>(i)] =
                implied_primary_mode(reg.t_low, top, grid.g1, grid.g2);
        }
    }

    auto scratch = policy_averages(out.k2_mode, grid, table, p1);
    double k1avg = scratch[0], k2avg = scratch[1], p2avg = scratch[2];

    std::vector<double> dv(static_cast<size_t>(region_count), 0.0);
    std::vector<int> dt(static_cast<size_t>(region_count), 0);
    std::vector<double> last_power_d2(static_cast<size_t>(region_count),
                                      std::numeric_limits<double>::infinity());

    auto refresh = [&](int part, int i) {
        const Region& reg = grid.regions[static_cast<size_t>(i)];
        const DecisionVars v = decision_variables(
            reg, out.k2_mode[static_cast<size_t>(i)], table, grid.g1, grid.g2);
        dt[static_cast<size_t>(i)] = v.t;
        dv[static_cast<size_t>(i)] =
            part == 1 ? v.d3 : (part == 2 ? v.d1 : v.d2_one);
    };

    bool infeasible = false;
    for (;;) {
        const bool c1ok = k1avg >= e1 - eps;
        const bool c2ok = p2avg <= p2max + eps;
        if (c1ok && c2ok) break;
        const int part = (!c1ok && !c2ok) ? 1 : (!c1ok ? 2 : 3);
        for (int i = 0; i < region_count; ++i) refresh(part, i);

        bool leave_part = false;
        while (!leave_part) {
            int im = -1;
            double best = 0.0;
            for (int i = 0; i < region_count; ++i)
                if (dv[static_cast<size_t>(i)] > best) {
                    best = dv[static_cast<size_t>(i)];
                    im = i;
                }
            if (im < 0) {
                infeasible = true;
                break;
            }

            const Region& reg = grid.regions[static_cast<size_t>(im)];
            const int m = out.k2_mode[static_cast<size_t>(im)];
            const int step = part == 3 ? 1 : dt[static_cast<size_t>(im)];
            const int next = m - step;

            if (part == 3) {
                // Eq-39 consequence: per-region power-effective ratios
                // only get worse as the mode drops
                if (best > last_power_d2[static_cast<size_t>(im)] *
                               (1.0 + 1e-12))
                    throw std::logic_error(
                        "power-effective decision ratio increased within a "
                        "region");
                last_power_d2[static_cast<size_t>(im)] = best;
            }

            const double k1_before = detail::primary_rate_value(
                reg, m, table, grid.g1, grid.g2);
            const double k1_after = detail::primary_rate_value(
                reg, next, table, grid.g1, grid.g2);
            k1avg += (k1_after - k1_before) * reg.mass;
            p2avg -= p1 *
                     (grid.g2[static_cast<size_t>(m)] -
                      grid.g2[static_cast<size_t>(next)]) *
                     reg.norm_power * reg.mass;
            k2avg -= (table.rate(m) - table.rate(next)) * reg.mass;
            out.k2_mode[static_cast<size_t>(im)] = next;
            out.k1_mode[static_cast<size_t>(im)] =
                next > 0 ? implied_primary_mode(reg.t_low, next, grid.g1,
                                                grid.g2)
                         : 0;
            ++out.iterations;

            const auto exact = policy_averages(out.k2_mode, grid, table, p1);
            if (std::fabs(exact[0] - k1avg) > 1e-9 ||
                std::fabs(exact[1] - k2avg) > 1e-9 ||
                std::fabs(exact[2] - p2avg) > 1e-9)
                throw std::logic_error(
                    "incremental constraint accounting drifted from the "
                    "recomputed averages");

            if (trace)
                trace->steps.push_back(GreedyStep{part, im, m, next, best,
                                                  k1avg, k2avg, p2avg});

            refresh(part, im);

            const bool c1 = k1avg >= e1 - eps;
            const bool c2 = p2avg <= p2max + eps;
            switch (part) {
                case 1:
                    leave_part = c1 || c2;
                    break;
                case 2:
                    leave_part = c1;
                    break;
                default:
                    leave_part = c2;
                    break;
            }
        }
        if (infeasible) break;
        // parts 2 and 3 cannot unsatisfy the other constraint; part 1
        // re-dispatches through the loop head
        if (k1avg >= e1 - eps && p2avg <= p2max + eps) break;
    }

    out.k1avg = k1avg;
    out.k2avg = k2avg;
    out.p2avg = p2avg;
    out.feasible = !infeasible;

    bool any_d1 = false;
    for (int i = 0; i < region_count; ++i) {
        const Region& reg = grid.regions[static_cast<size_t>(i)];
        const int m = out.k2_mode[static_cast<size_t>(i)];
        if (m <= 0) continue;
        const DecisionVars v =
            decision_variables(reg, m, table, grid.g1, grid.g2);
        if (v.t == 0) continue;
        if (!any_d1) {
            out.d1_min = out.d1_max = v.d1;
            any_d1 = true;
        } else {
            out.d1_min = std::min(out.d1_min, v.d1);
            out.d1_max = std::max(out.d1_max, v.d1);
        }
    }
    return out;
}

/// Brute-force reference: enumerates every assignment, keeps the best
/// feasible one (ties resolved to the lexicographically smallest).
inline PolicyAssignment exhaustive_optimize(const RegionGrid& grid,
                                            const ProblemSpec& spec,
                                            const AmcTable& table,
                                            double cap = 5e7) {
    validate(spec);
    const int region_count = grid.total();
    const int top = table.max_mode();
    const double eps = 1e-9;

    const double combos =
        std::pow(static_cast<double>(top) + 1.0, region_count);
    if (combos > cap) {
        char msg[128];
        std::snprintf(msg, sizeof(msg),
                      "(N+1)^V0 = %.3g assignments exceed the cap %.3g",
                      combos, cap);
        throw ResourceError(msg);
    }

    std::vector<size_t> free_idx;
    for (int i = 0; i < region_count; ++i) {
        const Region& reg = grid.regions[static_cast<size_t>(i)];
        if (reg.reachable && !reg.power_divergent && reg.mass > 0.0)
            free_idx.push_back(static_cast<size_t>(i));
    }

    PolicyAssignment best;
    best.k2_mode.assign(static_cast<size_t>(region_count), 0);
    best.k1_mode.assign(static_cast<size_t>(region_count), 0);
    bool found = false;

    std::vector<int> a(free_idx.size(), 0);
    std::vector<int> k2(static_cast<size_t>(region_count), 0);
    for (;;) {
        for (size_t j = 0; j < free_idx.size(); ++j) k2[free_idx[j]] = a[j];
        const auto avg = policy_averages(k2, grid, table, spec.primary_power);
        const bool ok = avg[0] >= spec.required_primary_rate - eps &&
                        avg[2] <= spec.cognitive_power_budget + eps;
        if (ok && (!found || avg[1] > best.k2avg)) {
            found = true;
            best.k2_mode = k2;
            best.k1avg = avg[0];
            best.k2avg = avg[1];
            best.p2avg = avg[2];
        }
        // advance the odometer, least-significant slot last so the scan
        // runs in ascending lexicographic order
        int pos = static_cast<int>(a.size()) - 1;
        while (pos >= 0 && a[static_cast<size_t>(pos)] == top) {
            a[static_cast<size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
        ++a[static_cast<size_t>(pos)];
    }

    best.feasible = found;
    if (found)
        for (size_t i = 0; i < best.k2_mode.size(); ++i)
            best.k1_mode[i] =
                best.k2_mode[i] > 0
                    ? implied_primary_mode(grid.regions[i].t_low,
                                           best.k2_mode[i], grid.g1, grid.g2)
                    : 0;
    return best;
}

/// Checks the flat-benefit condition under which the greedy assignment
/// is provably optimal: every defined rate-effective benefit ratio d1,
/// across all regions and all cognitive modes, takes one common value.
inline bool optimality_condition_holds(const RegionGrid& grid,
                                       const AmcTable& table,
                                       double rel_tol = 1e-12) {
    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (const Region& reg : grid.regions) {
        if (!reg.reachable || reg.power_divergent || !(reg.mass > 0.0))
            continue;
        for (int m = 1; m <= table.max_mode(); ++m) {
            const int k1m = implied_primary_mode(reg.t_low, m, grid.g1, grid.g2);
            if (k1m == table.max_mode()) continue;
            const DecisionVars v =
                decision_variables(reg, m, table, grid.g1, grid.g2);
            if (v.t == 0) continue;
            if (!any) {
                lo = hi = v.d1;
                any = true;
            } else {
                lo = std::min(lo, v.d1);
                hi = std::max(hi, v.d1);
            }
        }
    }
    if (!any) return true;  // vacuous: no rate coupling anywhere
    return hi - lo <= rel_tol * std::max(1.0, std::fabs(hi));
}

struct ConstantPowerResult {
    bool feasible = false;
    double p2 = 0.0;
    double k1avg = 0.0;
    double k2avg = 0.0;
};

namespace detail {

// averages of both links under constant cognitive power, from the exact
// interference-plus-noise SNIR ratio laws
inline double constant_power_link_avg(const AmcTable& table,
                                      const std::vector<double>& g_own,
                                      double p_own, double mean_own,
                                      double p_other, double mean_cross,
                                      double n0) {
    auto cdf = [&](double v) {
        if (std::isinf(v)) return 1.0;
        if (p_other > 0.0)
            return ratio_cdf(v, p_own, p_other, n0, mean_own, mean_cross);
        return 1.0 - std::exp(-v * n0 / (p_own * mean_own));
    };
    double acc = 0.0;
    for (int n = 1; n <= table.max_mode(); ++n) {
        const double lo = g_own[static_cast<size_t>(n)];
        const double hi =
            n < table.max_mode() ? g_own[static_cast<size_t>(n) + 1] : kInf;
        acc += table.rate(n) * (cdf(hi) - cdf(lo));
    }
    return acc;
}

}  // namespace detail

/// Constant-power scheme: both links adapt rate on their own SNIR only.
/// Picks the largest cognitive power in [0, P2max] that still leaves
/// the primary its required average rate; with rate_only set the power
/// search is skipped and the full budget is used as-is.
inline ConstantPowerResult constant_power_optimize(const GainModel& model,
                                                   const AmcTable& table,
                                                   const ProblemSpec& spec,
                                                   bool rate_only = false) {
    validate(model);
    validate(spec);
    const std::vector<double> v1 = snir_thresholds(table, spec.design_b1());
    const std::vector<double> v2 = snir_thresholds(table, spec.design_b2());
    const double p1 = spec.primary_power;
    const double n0 = model.noise_power;
    const double e1 = spec.required_primary_rate;

    auto k1_of = [&](double p2) {
        return detail::constant_power_link_avg(table, v1, p1, model.mean_s11,
                                               p2, model.mean_s21, n0);
    };
    auto k2_of = [&](double p2) {
        if (p2 <= 0.0) return 0.0;
        return detail::constant_power_link_avg(table, v2, p2, model.mean_s22,
                                               p1, model.mean_s12, n0);
    };

    ConstantPowerResult out;
    const double pmax = spec.cognitive_power_budget;
    if (rate_only || k1_of(pmax) >= e1) {
        out.p2 = pmax;
        out.k1avg = k1_of(pmax);
        out.k2avg = k2_of(pmax);
        out.feasible = out.k1avg >= e1 - 1e-9;
        return out;
    }
    if (k1_of(0.0) < e1) return out;  // silent cognitive cannot save C1

    // k1avg is continuous and nonincreasing in p2: keep lo feasible
    double lo = 0.0, hi = pmax;
    while (hi - lo > 1e-9 * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        (k1_of(mid) >= e1 ? lo : hi) = mid;
    }
    out.feasible = true;
    out.p2 = lo;
    out.k1avg = k1_of(lo);
    out.k2avg = k2_of(lo);
    return out;
}

}  // namespace cogra
