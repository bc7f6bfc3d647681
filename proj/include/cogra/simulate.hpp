#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "cogra/amc.hpp"
#include "cogra/baselines.hpp"
#include "cogra/errors.hpp"
#include "cogra/fading.hpp"
#include "cogra/optimizer.hpp"
#include "cogra/parallel.hpp"
#include "cogra/regions.hpp"

namespace cogra {

enum class Scheme {
    VariablePower,
    ConstantPower,
    InterweaveConstant,
    InterweaveAdaptive,
};

inline const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::VariablePower: return "variable-power";
        case Scheme::ConstantPower: return "constant-power";
        case Scheme::InterweaveConstant: return "interweave-constant";
        default: return "interweave-adaptive";
    }
}

struct SimConfig {
    std::uint64_t seed = 1;
    long blocks = 1'000'000;
    Scheme scheme = Scheme::VariablePower;
    double margin = 2.0;  // echoed into the report
    double power_cap_factor = 1e6;  // per-block cap, times the budget
    int stripes = 64;  // fixed substream count; results do not depend on threads
    int workers = 0;
};

inline void validate(const SimConfig& c) {
    if (c.blocks < 1) throw std::invalid_argument("block count must be >= 1");
    if (c.stripes < 1) throw std::invalid_argument("stripe count must be >= 1");
    if (!(c.power_cap_factor > 0.0))
        throw std::invalid_argument("power cap factor must be positive");
}

struct MetricStat {
    double mean = 0.0;
    double var = 0.0;  // sample variance of per-block values
    long n = 0;

    double half_width() const {  // 95% normal-approximation CI
        return n > 0 ? 1.96 * std::sqrt(var / static_cast<double>(n)) : 0.0;
    }
};

struct SimReport {
    Scheme scheme = Scheme::VariablePower;
    std::uint64_t seed = 0;
    long blocks = 0;
    double margin = 1.0;
    MetricStat k1avg, k2avg, p2avg;
    std::vector<long> region_hits;
    std::vector<double> region_freq;
    double primary_violation_rate = 0.0;
    double cognitive_violation_rate = 0.0;
    double primary_outage_rate = 0.0;
    long power_cap_events = 0;
};

namespace detail {

struct StripeAccum {
    double sum_k1 = 0, sq_k1 = 0;
    double sum_k2 = 0, sq_k2 = 0;
    double sum_p2 = 0, sq_p2 = 0;
    long primary_violations = 0, cognitive_violations = 0;
    long outages = 0, cap_events = 0;
    std::vector<long> hits;
    long blocks = 0;

    void block(double k1, double k2, double p2) {
        sum_k1 += k1;
        sq_k1 += k1 * k1;
        sum_k2 += k2;
        sq_k2 += k2 * k2;
        sum_p2 += p2;
        sq_p2 += p2 * p2;
        ++blocks;
    }
};

inline MetricStat finish_metric(double sum, double sq, long n) {
    MetricStat m;
    m.n = n;
    m.mean = sum / static_cast<double>(n);
    if (n > 1)
        m.var = std::max(0.0, (sq - static_cast<double>(n) * m.mean * m.mean) /
                                  static_cast<double>(n - 1));
    return m;
}

// per-block behaviour of one scheme; stateless across blocks
struct BlockModel {
    const AmcTable* table = nullptr;
    const ProblemSpec* spec = nullptr;
    const GainModel* model = nullptr;
    // variable-power policy pieces
    const PolicyAssignment* policy = nullptr;
    const RegionGrid* grid = nullptr;
    // constant-power piece
    double const_p2 = 0.0;
    std::vector<double> v1, v2;  // design thresholds where needed
    // interweave pieces
    double lambda = 0.0;
    std::vector<double> adaptive_thresholds;  // on s22/N0
    double interweave_budget = 0.0;           // absolute power while active
    Scheme scheme = Scheme::VariablePower;
    double power_cap = kInf;
};

inline void run_block(const BlockModel& bm, const BlockGains& g, double coin,
                      StripeAccum& acc) {
    const double p1 = bm.spec->primary_power;
    const double n0 = bm.model->noise_power;
    const AmcTable& table = *bm.table;

    double k1_rate = 0.0, k2_rate = 0.0, p2 = 0.0;
    switch (bm.scheme) {
        case Scheme::VariablePower: {
            const double alpha = g.alpha();
            const double beta = g.beta();
            const int i = locate_region(alpha, beta, *bm.grid);
            ++acc.hits[static_cast<size_t>(i)];
            const int m = bm.policy->k2_mode[static_cast<size_t>(i)];
            if (m > 0) {
                p2 = p1 * bm.grid->g2[static_cast<size_t>(m)] / beta;
                if (p2 > bm.power_cap) {
                    p2 = bm.power_cap;
                    ++acc.cap_events;
                }
                const double gamma1 = p1 * g.s11 / (p2 * g.s21 + n0);
                const double gamma2 = p2 * g.s22 / (p1 * g.s12 + n0);
                const int k1m = bm.policy->k1_mode[static_cast<size_t>(i)];
                k1_rate = table.rate(k1m);
                k2_rate = table.rate(m);
                if (k1m >= 1 &&
                    ber_probability(gamma1, table.mode(k1m)) > bm.spec->b1)
                    ++acc.primary_violations;
                if (ber_probability(gamma2, table.mode(m)) > bm.spec->b2)
                    ++acc.cognitive_violations;
                if (k1m == 0) ++acc.outages;
            } else {
                const double gamma1 = p1 * g.s11 / n0;
                const int k1m = mode_from_snir(gamma1, bm.grid->g1);
                k1_rate = table.rate(k1m);
                if (k1m >= 1 &&
                    ber_probability(gamma1, table.mode(k1m)) > bm.spec->b1)
                    ++acc.primary_violations;
            }
            break;
        }
        case Scheme::ConstantPower: {
            p2 = bm.const_p2;
            const double gamma1 = p1 * g.s11 / (p2 * g.s21 + n0);
            const double gamma2 =
                p2 > 0.0 ? p2 * g.s22 / (p1 * g.s12 + n0) : 0.0;
            const int k1m = mode_from_snir(gamma1, bm.v1);
            const int k2m = p2 > 0.0 ? mode_from_snir(gamma2, bm.v2) : 0;
            k1_rate = table.rate(k1m);
            k2_rate = table.rate(k2m);
            if (k1m >= 1 && ber_probability(gamma1, table.mode(k1m)) > bm.spec->b1)
                ++acc.primary_violations;
            if (k2m >= 1 && ber_probability(gamma2, table.mode(k2m)) > bm.spec->b2)
                ++acc.cognitive_violations;
            break;
        }
        case Scheme::InterweaveConstant:
        case Scheme::InterweaveAdaptive: {
            const bool primary_active = coin < bm.lambda;
            if (primary_active) {
                const double gamma1 = (p1 / bm.lambda) * g.s11 / n0;
                const int k1m = mode_from_snir(gamma1, bm.v1);
                k1_rate = table.rate(k1m);
                if (k1m >= 1 &&
                    ber_probability(gamma1, table.mode(k1m)) > bm.spec->b1)
                    ++acc.primary_violations;
            } else if (bm.scheme == Scheme::InterweaveConstant) {
                p2 = bm.interweave_budget;
                const double gamma2 = p2 * g.s22 / n0;
                const int k2m = mode_from_snir(gamma2, bm.v2);
                k2_rate = table.rate(k2m);
                if (k2m >= 1 &&
                    ber_probability(gamma2, table.mode(k2m)) > bm.spec->b2)
                    ++acc.cognitive_violations;
            } else {
                const double xi = g.s22 / n0;
                const int k2m = mode_from_snir(xi, bm.adaptive_thresholds);
                if (k2m >= 1) {
                    // channel inversion: exactly the design threshold SNIR
                    p2 = bm.v2[static_cast<size_t>(k2m)] * n0 / g.s22;
                    const double gamma2 = p2 * g.s22 / n0;
                    k2_rate = table.rate(k2m);
                    if (ber_probability(gamma2, table.mode(k2m)) > bm.spec->b2)
                        ++acc.cognitive_violations;
                }
            }
            break;
        }
    }
    acc.block(k1_rate, k2_rate, p2);
}

}  // namespace detail

/// Scheme input: what the simulator replays, produced by the matching
/// solver.
struct PolicyInput {
    const PolicyAssignment* policy;
    const RegionGrid* grid;
};
struct ConstantPowerInput {
    ConstantPowerResult solution;
};
struct InterweaveInput {
    double lambda = 0.0;
    std::vector<double> adaptive_thresholds;  // empty for constant power
};
using SchemeInput =
    std::variant<PolicyInput, ConstantPowerInput, InterweaveInput>;

/// Replays a solved scheme over sampled fading blocks. Deterministic in
/// the seed: blocks are split over a fixed number of stripes with
/// disjoint random substreams, so thread count never changes results.
inline SimReport simulate_scheme(const SimConfig& config,
                                 const SchemeInput& input,
                                 const GainModel& model, const AmcTable& table,
                                 const ProblemSpec& spec) {
    validate(config);
    validate(model);
    validate(spec);

    detail::BlockModel bm;
    bm.table = &table;
    bm.spec = &spec;
    bm.model = &model;
    bm.scheme = config.scheme;
    bm.power_cap = config.power_cap_factor * spec.cognitive_power_budget;

    int regions = 0;
    if (config.scheme == Scheme::VariablePower) {
        const auto* pi = std::get_if<PolicyInput>(&input);
        if (!pi || !pi->policy || !pi->grid)
            throw ConfigError("variable-power simulation needs a policy and grid");
        if (pi->policy->k2_mode.size() != pi->grid->regions.size())
            throw ConfigError("policy does not match the region grid");
        bm.policy = pi->policy;
        bm.grid = pi->grid;
        regions = pi->grid->total();
    } else if (config.scheme == Scheme::ConstantPower) {
        const auto* ci = std::get_if<ConstantPowerInput>(&input);
        if (!ci) throw ConfigError("constant-power simulation needs its solution");
        bm.const_p2 = ci->solution.p2;
        bm.v1 = snir_thresholds(table, spec.design_b1());
        bm.v2 = snir_thresholds(table, spec.design_b2());
    } else {
        const auto* ii = std::get_if<InterweaveInput>(&input);
        if (!ii) throw ConfigError("interweave simulation needs its solution");
        if (!(ii->lambda >= 0.0) || !(ii->lambda <= 1.0))
            throw ConfigError("interweave activity fraction out of range");
        bm.lambda = ii->lambda;
        bm.v1 = snir_thresholds(table, spec.design_b1());
        bm.v2 = snir_thresholds(table, spec.design_b2());
        if (config.scheme == Scheme::InterweaveAdaptive) {
            bm.adaptive_thresholds = ii->adaptive_thresholds;
            if (bm.adaptive_thresholds.empty())
                bm.adaptive_thresholds.assign(bm.v2.size(), kInf);
        } else {
            bm.interweave_budget =
                bm.lambda < 1.0
                    ? spec.cognitive_power_budget / (1.0 - bm.lambda)
                    : 0.0;
        }
    }

    const int stripes = static_cast<int>(
        std::min<long>(config.stripes, config.blocks));
    std::vector<detail::StripeAccum> acc(static_cast<size_t>(stripes));
    const long base = config.blocks / stripes;
    const long rem = config.blocks % stripes;

    parallel_for(
        stripes,
        [&](int s) {
            detail::StripeAccum& a = acc[static_cast<size_t>(s)];
            a.hits.assign(static_cast<size_t>(regions), 0);
            GainSampler sampler(model, config.seed,
                                static_cast<std::uint64_t>(s));
            std::mt19937_64 coin_engine(
                std::seed_seq{config.seed, static_cast<std::uint64_t>(s),
                              std::uint64_t{4}});
            const long count = base + (s < rem ? 1 : 0);
            for (long b = 0; b < count; ++b) {
                const BlockGains g = sampler.next();
                const double coin =
                    (static_cast<double>(coin_engine() >> 11) + 0.5) *
                    0x1.0p-53;
                detail::run_block(bm, g, coin, a);
            }
        },
        config.workers);

    detail::StripeAccum total;
    total.hits.assign(static_cast<size_t>(regions), 0);
    for (const auto& a : acc) {
        total.sum_k1 += a.sum_k1;
        total.sq_k1 += a.sq_k1;
        total.sum_k2 += a.sum_k2;
        total.sq_k2 += a.sq_k2;
        total.sum_p2 += a.sum_p2;
        total.sq_p2 += a.sq_p2;
        total.primary_violations += a.primary_violations;
        total.cognitive_violations += a.cognitive_violations;
        total.outages += a.outages;
        total.cap_events += a.cap_events;
        total.blocks += a.blocks;
        for (size_t i = 0; i < a.hits.size(); ++i) total.hits[i] += a.hits[i];
    }

    SimReport report;
    report.scheme = config.scheme;
    report.seed = config.seed;
    report.blocks = total.blocks;
    report.margin = spec.margin;
    report.k1avg = detail::finish_metric(total.sum_k1, total.sq_k1, total.blocks);
    report.k2avg = detail::finish_metric(total.sum_k2, total.sq_k2, total.blocks);
    report.p2avg = detail::finish_metric(total.sum_p2, total.sq_p2, total.blocks);
    report.region_hits = total.hits;
    report.region_freq.reserve(total.hits.size());
    for (long h : total.hits)
        report.region_freq.push_back(static_cast<double>(h) /
                                     static_cast<double>(total.blocks));
    const double nb = static_cast<double>(total.blocks);
    report.primary_violation_rate = total.primary_violations / nb;
    report.cognitive_violation_rate = total.cognitive_violations / nb;
    report.primary_outage_rate = total.outages / nb;
    report.power_cap_events = total.cap_events;
    return report;
}

/// Pools reports that share everything but the seed.
inline SimReport summarize(const std::vector<SimReport>& reports) {
    if (reports.empty()) throw ConfigError("nothing to summarize");
    const SimReport& head = reports.front();
    SimReport out = head;
    if (reports.size() == 1) return out;

    auto pool = [&](auto pick) {
        double sum = 0.0, sq = 0.0;
        long n = 0;
        for (const SimReport& r : reports) {
            const MetricStat& m = pick(r);
            sum += m.mean * static_cast<double>(m.n);
            sq += m.var * static_cast<double>(m.n - 1) +
                  static_cast<double>(m.n) * m.mean * m.mean;
            n += m.n;
        }
        return detail::finish_metric(sum, sq, n);
    };

    long blocks = 0;
    for (const SimReport& r : reports) {
        if (r.scheme != head.scheme || r.margin != head.margin ||
            r.region_hits.size() != head.region_hits.size())
            throw ConfigError("cannot merge heterogeneous simulation reports");
        blocks += r.blocks;
    }

    out.blocks = blocks;
    out.k1avg = pool([](const SimReport& r) -> const MetricStat& { return r.k1avg; });
    out.k2avg = pool([](const SimReport& r) -> const MetricStat& { return r.k2avg; });
    out.p2avg = pool([](const SimReport& r) -> const MetricStat& { return r.p2avg; });

    out.region_hits.assign(head.region_hits.size(), 0);
    out.power_cap_events = 0;
    double pv = 0.0, cv = 0.0, ov = 0.0;
    for (const SimReport& r : reports) {
        for (size_t i = 0; i < r.region_hits.size(); ++i)
            out.region_hits[i] += r.region_hits[i];
        pv += r.primary_violation_rate * static_cast<double>(r.blocks);
        cv += r.cognitive_violation_rate * static_cast<double>(r.blocks);
        ov += r.primary_outage_rate * static_cast<double>(r.blocks);
        out.power_cap_events += r.power_cap_events;
    }
    out.region_freq.clear();
    for (long h : out.region_hits)
        out.region_freq.push_back(static_cast<double>(h) /
                                  static_cast<double>(blocks));
    out.primary_violation_rate = pv / static_cast<double>(blocks);
    out.cognitive_violation_rate = cv / static_cast<double>(blocks);
    out.primary_outage_rate = ov / static_cast<double>(blocks);
    return out;
}

}  // namespace cogra
