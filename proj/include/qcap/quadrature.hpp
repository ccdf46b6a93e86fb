#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <string>
#include <vector>

#include "qcap/errors.hpp"

namespace qcap {

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0; // accumulated Kronrod-Gauss error estimate
    int evaluations = 0;
    bool converged = false;

    // Throws unless the requested tolerance was reached.
    double checked(double rel_tol) const {
        if (!converged)
            throw NumericalError("quadrature did not converge: achieved relative error " +
                                 std::to_string(achieved_rel()) + ", requested " +
                                 std::to_string(rel_tol));
        return value;
    }
    double achieved_rel() const {
        const double scale = std::abs(value);
        return scale > 0.0 ? abs_error / scale : abs_error;
    }
};

namespace detail {

// Gauss-Kronrod 7-15 nodes and weights on [-1,1] (nonnegative half; the rule
// is symmetric). Standard published constants; odd Kronrod indices are the
// embedded 7-point Gauss nodes.
inline constexpr std::array<double, 8> kGK15Nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kGK15KronrodW = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr std::array<double, 4> kGK15GaussW = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
inline void gk15(const F& f, double a, double b, double& kronrod, double& err) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double resk = kGK15KronrodW[7] * f(c);
    double resg = kGK15GaussW[3] * f(c);
    for (int i = 0; i < 7; ++i) {
        const double x = h * kGK15Nodes[i];
        const double fsum = f(c - x) + f(c + x);
        resk += kGK15KronrodW[i] * fsum;
        if (i % 2 == 1) resg += kGK15GaussW[i / 2] * fsum;
    }
    kronrod = resk * h;
    err = std::abs((resk - resg) * h);
}

struct Interval {
    double a, b, value, err;
    bool operator<(const Interval& o) const { return err < o.err; }
};

} // namespace detail

// Globally adaptive Gauss-Kronrod integration of f over the finite interval
// [a,b]: repeatedly bisect the interval with the largest error estimate until
// the summed estimate meets max(abs_tol, rel_tol*|I|) or the interval budget
// runs out.
template <class F>
inline QuadResult integrate(F&& f, double a, double b, double rel_tol = 1e-8,
                            double abs_tol = 0.0, int max_intervals = 4000) {
    if (!(a <= b))
        throw ValidationError("interval", "integration interval is backwards or not finite: [" +
                                              std::to_string(a) + ", " + std::to_string(b) + "]");
    QuadResult out;
    if (a == b) {
        out.converged = true;
        return out;
    }
    std::priority_queue<detail::Interval> q;
    double total = 0.0, total_err = 0.0;
    auto push = [&](double lo, double hi) {
        detail::Interval iv{lo, hi, 0.0, 0.0};
        detail::gk15(f, lo, hi, iv.value, iv.err);
        out.evaluations += 15;
        total += iv.value;
        total_err += iv.err;
        q.push(iv);
    };
    push(a, b);
    int splits = 0;
    while (total_err > std::max(abs_tol, rel_tol * std::abs(total)) && splits < max_intervals) {
        const detail::Interval worst = q.top();
        q.pop();
        total -= worst.value;
        total_err -= worst.err;
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) { // interval at FP resolution
            total += worst.value;
            total_err += worst.err;
            break;
        }
        push(worst.a, mid);
        push(mid, worst.b);
        ++splits;
    }
    // Re-sum from the heap for a less drifty total.
    double v = 0.0, e = 0.0;
    while (!q.empty()) {
        v += q.top().value;
        e += q.top().err;
        q.pop();
    }
    out.value = v;
    out.abs_error = e;
    out.converged = e <= std::max(abs_tol, rel_tol * std::abs(v)) ||
                    e <= 1e-14 * std::max(1.0, std::abs(v));
    return out;
}

// E[f(W)] for W ~ Exp(rate), computed on the compact substitution t=e^{-rw}:
//   int_0^inf f(w) r e^{-rw} dw = int_0^1 f(-ln(t)/r) dt.
// The Kronrod nodes are interior, so t=0 (w=inf) is never evaluated; f need
// only be bounded.
template <class F>
inline QuadResult exp_law_expectation(F&& f, double rate, double rel_tol = 1e-8) {
    if (!(rate > 0.0)) throw ValidationError("rate", "exponential law needs rate > 0");
    return integrate([&f, rate](double t) { return f(-std::log(t) / rate); }, 0.0, 1.0, rel_tol,
                     1e-13);
}

} // namespace qcap
