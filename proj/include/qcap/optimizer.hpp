#pragma once

#include <cmath>
#include <functional>
#include <utility>

#include "qcap/errors.hpp"

namespace qcap {

struct ScalarProblem {
    std::function<double(double)> objective;
    double lo = 0.0;
    double hi = 1.0;
    double tolerance = 1e-6; // in the argument
    int max_evals = 200;     // refinement budget (prescan excluded)
};

struct OptimizeResult {
    double arg = 0.0;
    double value = 0.0;
    bool degenerate = false; // objective flat over the prescan
    int evaluations = 0;
};

// Derivative-free maximization: a 64-point prescan brackets the best grid
// point, then golden-section refines inside that bracket. For a unimodal
// objective the prescan makes the refinement global; derivatives are never
// needed, so tabulated/noisy objectives are fine.
inline OptimizeResult maximize(const ScalarProblem& prob) {
    if (!prob.objective) throw ValidationError("objective", "missing callable");
    if (!(prob.lo < prob.hi)) throw ValidationError("lo", "need lo < hi");
    if (!(prob.tolerance > 0.0)) throw ValidationError("tolerance", "must be positive");

    constexpr int kScan = 64;
    OptimizeResult out;
    double best = -HUGE_VAL, worst = HUGE_VAL;
    int best_i = 0;
    double xs[kScan];
    for (int i = 0; i < kScan; ++i) {
        xs[i] = prob.lo + (prob.hi - prob.lo) * double(i) / double(kScan - 1);
        const double v = prob.objective(xs[i]);
        ++out.evaluations;
        if (v > best) {
            best = v;
            best_i = i;
        }
        if (v < worst) worst = v;
    }
    if (best - worst < 1e-14) {
        out.degenerate = true;
        out.arg = 0.5 * (prob.lo + prob.hi);
        out.value = prob.objective(out.arg);
        ++out.evaluations;
        return out;
    }

    double a = xs[best_i > 0 ? best_i - 1 : 0];
    double b = xs[best_i < kScan - 1 ? best_i + 1 : kScan - 1];
    const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = prob.objective(c);
    double fd = prob.objective(d);
    out.evaluations += 2;
    while (b - a > prob.tolerance && out.evaluations < prob.max_evals + kScan) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = prob.objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = prob.objective(d);
        }
        ++out.evaluations;
    }
    out.arg = 0.5 * (a + b);
    out.value = prob.objective(out.arg);
    ++out.evaluations;
    if (out.value < best) { // guard: never return worse than the scan's best
        out.arg = xs[best_i];
        out.value = best;
    }
    return out;
}

inline OptimizeResult minimize(ScalarProblem prob) {
    auto f = std::move(prob.objective);
    prob.objective = [f = std::move(f)](double x) { return -f(x); };
    OptimizeResult r = maximize(prob);
    r.value = -r.value;
    return r;
}

} // namespace qcap
