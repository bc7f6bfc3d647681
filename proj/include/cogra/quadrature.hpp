#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>
#include <vector>

#include "cogra/errors.hpp"

namespace cogra {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0;
    long evals = 0;
    bool converged = false;
};

namespace detail {

// 15-point Kronrod rule with embedded 7-point Gauss rule (QUADPACK dqk15
// constants). Gauss points sit at the odd-index Kronrod abscissae.
inline constexpr double kGkNode[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0};
inline constexpr double kGkWeight[8] = {
    0.0229353220105292, 0.0630920926299785, 0.1047900103222502,
    0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
    0.2044329400752989, 0.2094821410847278};
inline constexpr double kGaussWeight[4] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189,
    0.4179591836734694};

template <class F>
inline void gk15(const F& f, double a, double b, double& value, double& err) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    double fv[15];
    const double fc = f(center);
    fv[7] = fc;
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kGkNode[j];
        fv[j] = f(center - dx);
        fv[14 - j] = f(center + dx);
    }

    double resk = kGkWeight[7] * fc;
    double resg = kGaussWeight[3] * fc;
    for (int j = 0; j < 7; ++j) {
        resk += kGkWeight[j] * (fv[j] + fv[14 - j]);
        if (j % 2 == 1) resg += kGaussWeight[j / 2] * (fv[j] + fv[14 - j]);
    }

    const double mean = resk * 0.5;
    double resasc = kGkWeight[7] * std::fabs(fc - mean);
    for (int j = 0; j < 7; ++j)
        resasc += kGkWeight[j] *
                  (std::fabs(fv[j] - mean) + std::fabs(fv[14 - j] - mean));
    resasc *= std::fabs(half);

    value = resk * half;
    err = std::fabs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
}

struct Segment {
    double a, b, value, err;
    bool operator<(const Segment& o) const { return err < o.err; }
};

}  // namespace detail

/// Globally adaptive Gauss-Kronrod integration of f over the finite
/// interval [a, b] to the requested absolute tolerance.
template <class F>
QuadResult integrate(const F& f, double a, double b, double abs_tol,
                     long max_evals = 20'000'000) {
    QuadResult out;
    if (a == b) {
        out.converged = true;
        return out;
    }

    std::priority_queue<detail::Segment> queue;
    detail::Segment s{a, b, 0.0, 0.0};
    detail::gk15(f, a, b, s.value, s.err);
    out.evals = 15;
    double total = s.value, total_err = s.err;
    queue.push(s);

    while (total_err > abs_tol && out.evals < max_evals) {
        const detail::Segment worst = queue.top();
        queue.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // interval no longer splittable at double precision
            queue.push(worst);
            break;
        }
        detail::Segment left{worst.a, mid, 0.0, 0.0};
        detail::Segment right{mid, worst.b, 0.0, 0.0};
        detail::gk15(f, left.a, left.b, left.value, left.err);
        detail::gk15(f, right.a, right.b, right.value, right.err);
        out.evals += 30;
        total += left.value + right.value - worst.value;
        total_err += left.err + right.err - worst.err;
        queue.push(left);
        queue.push(right);
    }

    out.value = total;
    out.abs_error = total_err;
    out.converged = total_err <= abs_tol;
    return out;
}

/// Integration over [a, x_hi] where x_hi may be +infinity; semi-infinite
/// ranges are mapped to a finite interval by x = u/(1-u).
template <class F>
QuadResult integrate_upto_inf(const F& f, double a, double x_hi,
                              double abs_tol, long max_evals = 20'000'000) {
    if (!std::isinf(x_hi)) return integrate(f, a, x_hi, abs_tol, max_evals);
    const double ua = a / (1.0 + a);
    auto g = [&f](double u) {
        const double om = 1.0 - u;
        const double x = u / om;
        return f(x) / (om * om);
    };
    return integrate(g, ua, 1.0, abs_tol, max_evals);
}

/// Nested adaptive rule for f(x, y) over [x_lo, x_hi] x [y_lo, y_hi];
/// either upper limit may be +infinity. Tolerance is absolute on the
/// final value; the inner integral runs two digits tighter.
template <class F2>
QuadResult integrate2d(const F2& f, double x_lo, double x_hi, double y_lo,
                       double y_hi, double abs_tol,
                       long max_evals = 50'000'000) {
    QuadResult out;
    long evals = 0;
    bool inner_ok = true;

    const double inner_tol = std::max(abs_tol * 1e-2, 1e-14);
    auto line = [&](double y) {
        auto fx = [&f, y](double x) { return f(x, y); };
        QuadResult r = integrate_upto_inf(fx, x_lo, x_hi, inner_tol, 400'000);
        evals += r.evals;
        inner_ok = inner_ok && r.converged;
        return r.value;
    };

    QuadResult outer = integrate_upto_inf(line, y_lo, y_hi, abs_tol, max_evals);
    out.value = outer.value;
    out.abs_error = outer.abs_error;
    out.evals = evals;
    out.converged = outer.converged && inner_ok;
    return out;
}

/// As integrate2d but throws NumericError when the tolerance is not met.
template <class F2>
double integrate2d_checked(const F2& f, double x_lo, double x_hi, double y_lo,
                           double y_hi, double abs_tol, const char* what,
                           long max_evals = 50'000'000) {
    QuadResult r = integrate2d(f, x_lo, x_hi, y_lo, y_hi, abs_tol, max_evals);
    if (!r.converged) {
        char msg[256];
        std::snprintf(msg, sizeof(msg),
                      "%s: quadrature did not reach tol=%g over "
                      "[%g,%g]x[%g,%g] (err=%g after %ld evals)",
                      what, abs_tol, x_lo, x_hi, y_lo, y_hi, r.abs_error,
                      r.evals);
        throw NumericError(msg);
    }
    return r.value;
}

}  // namespace cogra
