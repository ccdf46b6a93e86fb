#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>

#include "qcap/decoherence.hpp"
#include "qcap/distributions.hpp"
#include "qcap/entropy.hpp"
#include "qcap/errors.hpp"
#include "qcap/optimizer.hpp"
#include "qcap/quadrature.hpp"
#include "qcap/queue_sim.hpp"
#include "qcap/stats.hpp"

namespace qcap {

enum class Method { Analytic, MonteCarlo, UpperBound, LowerBound };

inline const char* to_string(Method m) noexcept {
    switch (m) {
        case Method::Analytic: return "analytic";
        case Method::MonteCarlo: return "monte_carlo";
        case Method::UpperBound: return "upper_bound";
        default: return "lower_bound";
    }
}

struct CapacityContext {
    double lambda = 0.0;
    std::string noise;       // "erasure" / "depolarizing"
    int d = 2;
    bool timing_known = true;
    std::string service;     // service-law description, if one is involved
    std::string p_map;       // decoherence-map description
    std::string waiting_law; // which stationary law the expectation is under
};

// A capacity value in bits per unit time, tagged with how it was obtained.
struct CapacityEstimate {
    double value = 0.0;
    Method method = Method::Analytic;
    double std_error = 0.0; // 0 for Analytic
    CapacityContext context;
};

namespace detail {
inline CapacityEstimate make_estimate(double value, Method m, double se, CapacityContext ctx) {
    const double cap = ctx.lambda * std::log2(double(ctx.d));
    if (!(value >= -1e-9) || !(value <= cap + 1e-9))
        throw NumericalError("capacity " + std::to_string(value) + " outside [0, lambda*log2(d)] = [0, " +
                             std::to_string(cap) + "]");
    if (value < 0.0) value = 0.0;
    return {value, m, se, std::move(ctx)};
}
} // namespace detail

// ---------------------------------------------------------------------------
// Erasure queue-channel
// ---------------------------------------------------------------------------

// C = lambda * E[1 - p(W)] bits/sec; holds with or without receiver timing
// knowledge, so no flag is taken.
inline CapacityEstimate erasure_capacity_general(double lambda, double mean_survival,
                                                 CapacityContext ctx = {}) {
    if (!(lambda > 0.0)) throw ValidationError("lambda", "arrival rate must be positive");
    if (!(mean_survival >= 0.0 && mean_survival <= 1.0))
        throw ValidationError("mean_survival", "E[1-p(W)] must lie in [0,1]");
    ctx.lambda = lambda;
    ctx.noise = "erasure";
    ctx.d = 2;
    return detail::make_estimate(lambda * mean_survival, Method::Analytic, 0.0, std::move(ctx));
}

// alpha = (1 - Laplace_S(kappa)) / kappa for a unit-mean service law; the
// one-number service summary in the M/GI/1 closed form. Lies in (0, 1].
inline double mg1_alpha(const DistributionSpec& service, double kappa) {
    if (!(kappa > 0.0)) throw ValidationError("kappa", "decoherence rate must be positive");
    if (std::abs(service.mean() - 1.0) > 1e-9)
        throw ValidationError("service", "M/GI/1 closed form expects a unit-mean service law, got mean " +
                                             std::to_string(service.mean()));
    return (1.0 - service.laplace(kappa)) / kappa;
}

// M/GI/1 queue, p(w) = 1 - e^{-kappa w}:  C = lambda(1-lambda)/(1-alpha*lambda).
inline CapacityEstimate mg1_closed_form(double lambda, double alpha, CapacityContext ctx = {}) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw ValidationError("lambda", "need 0 < lambda < 1");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ValidationError("alpha", "need 0 < alpha <= 1");
    ctx.lambda = lambda;
    ctx.noise = "erasure";
    ctx.d = 2;
    if (ctx.waiting_law.empty()) ctx.waiting_law = "pk-delay";
    return detail::make_estimate(lambda * (1.0 - lambda) / (1.0 - alpha * lambda), Method::Analytic,
                                 0.0, std::move(ctx));
}

inline CapacityEstimate mg1_closed_form(double lambda, const DistributionSpec& service, double kappa) {
    CapacityContext ctx;
    ctx.service = service.describe();
    ctx.p_map = "exp-decay(kappa=" + std::to_string(kappa) + ")";
    return mg1_closed_form(lambda, mg1_alpha(service, kappa), std::move(ctx));
}

struct OptimalLambda {
    double lambda_star = 0.0;
    bool boundary = false; // the optimum sits on the stability boundary
};

// Capacity-maximizing arrival rate of the M/GI/1 closed form:
// lambda* = 1/(1+sqrt(1-alpha)). alpha=1 puts the optimum exactly on the
// stability boundary lambda=1; that is reported, not crashed on.
inline OptimalLambda mg1_optimal_lambda(double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ValidationError("alpha", "need 0 < alpha <= 1");
    const double s = std::sqrt(1.0 - alpha);
    return {1.0 / (1.0 + s), s == 0.0};
}

// ---------------------------------------------------------------------------
// General-p M/M/1 route (posited waiting law W ~ Exp((1-lambda)/lambda))
// ---------------------------------------------------------------------------

// p~(u) = int_0^inf e^{-uw} p(w) dw. Closed form for exponential decay,
// adaptive quadrature otherwise (substitution t = e^{-uw} makes the domain
// compact; relative tolerance 1e-8, failure to converge throws).
inline double p_laplace(const PMap& pm, double u, double rel_tol = 1e-8) {
    if (!(u > 0.0)) throw ValidationError("u", "transform argument must be positive");
    if (const auto* e = std::get_if<ExpDecay>(&pm.raw()))
        return 1.0 / u - 1.0 / (u + e->kappa);
    QuadResult r = integrate([&pm, u](double t) { return pm(-std::log(t) / u); }, 0.0, 1.0,
                             rel_tol, 1e-13);
    return r.checked(rel_tol) / u;
}

// C = lambda * (1 - u0 * p~(u0)), u0 = (1-lambda)/lambda: erasure capacity of
// the M/M/1 queue for an arbitrary erasure map, under the posited law
// W ~ Exp(u0). Note u0*p~(u0) is exactly E[p(W)] under that law.
inline CapacityEstimate mm1_general_p_capacity(double lambda, const PMap& pm,
                                               double rel_tol = 1e-8) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw ValidationError("lambda", "need 0 < lambda < 1");
    const double u0 = (1.0 - lambda) / lambda;
    const double v = lambda * (1.0 - u0 * p_laplace(pm, u0, rel_tol));
    CapacityContext ctx;
    ctx.lambda = lambda;
    ctx.noise = "erasure";
    ctx.d = 2;
    ctx.service = "exp(rate=1)";
    ctx.p_map = pm.describe();
    ctx.waiting_law = "exp((1-lambda)/lambda)";
    return detail::make_estimate(v, Method::Analytic, 0.0, std::move(ctx));
}

struct GeneralPOptimum {
    double lambda_star = 0.0;
    double capacity = 0.0;
    bool boundary = false; // optimum pinned to the search-box edge
    int evaluations = 0;
};

// Optimal arrival rate for the general-p M/M/1 capacity:
// lambda* = 1 - argmin_{u in (0,1)} u(1 + p~(u/(1-u))).
// The box is [1e-6, 1-1e-6]; a minimizer at either edge (e.g. p identically
// 0, where the objective is monotone) is flagged as a boundary result.
inline GeneralPOptimum mm1_optimal_lambda_general_p(const PMap& pm, double tolerance = 1e-6) {
    constexpr double kEdge = 1e-6;
    ScalarProblem prob;
    prob.objective = [&pm](double u) { return u * (1.0 + p_laplace(pm, u / (1.0 - u))); };
    prob.lo = kEdge;
    prob.hi = 1.0 - kEdge;
    prob.tolerance = tolerance;
    OptimizeResult r = minimize(prob);
    GeneralPOptimum out;
    out.lambda_star = 1.0 - r.arg;
    out.boundary = r.degenerate || r.arg <= prob.lo + 2.0 * tolerance || r.arg >= prob.hi - 2.0 * tolerance;
    out.capacity = mm1_general_p_capacity(out.lambda_star, pm).value;
    out.evaluations = r.evaluations;
    return out;
}

// ---------------------------------------------------------------------------
// Depolarizing queue-channel (d = 2) and timing-blind bounds
// ---------------------------------------------------------------------------

// C = lambda * (1 - E[h(p(W)/2)]) bits/sec, receiver knowing arrival and
// departure times.
inline CapacityEstimate depolarizing_capacity(double lambda, double mean_entropy,
                                              CapacityContext ctx = {}) {
    if (!(lambda > 0.0)) throw ValidationError("lambda", "arrival rate must be positive");
    if (!(mean_entropy >= 0.0 && mean_entropy <= 1.0))
        throw ValidationError("mean_entropy", "E[h(p(W)/2)] must lie in [0,1]");
    ctx.lambda = lambda;
    ctx.noise = "depolarizing";
    ctx.d = 2;
    ctx.timing_known = true;
    return detail::make_estimate(lambda * (1.0 - mean_entropy), Method::Analytic, 0.0,
                                 std::move(ctx));
}

// Without timing knowledge the induced BSC gives
//   lower = lambda(1 - h(E[phi])),  upper = lambda(1 - E[h(phi)]).
// Any genuine moment pair satisfies E[h(phi)] <= h(E[phi]) (concavity), so
// lower <= upper; inconsistent inputs are rejected.
inline std::pair<CapacityEstimate, CapacityEstimate> bsc_bounds_no_timing(double lambda,
                                                                          double mean_phi,
                                                                          double mean_entropy,
                                                                          CapacityContext ctx = {}) {
    if (!(lambda > 0.0)) throw ValidationError("lambda", "arrival rate must be positive");
    if (!(mean_phi >= 0.0 && mean_phi <= 0.5))
        throw ValidationError("mean_phi", "E[phi(W)] must lie in [0,1/2]");
    if (!(mean_entropy >= 0.0 && mean_entropy <= 1.0))
        throw ValidationError("mean_entropy", "E[h(phi(W))] must lie in [0,1]");
    const double h_of_mean = binary_entropy(mean_phi);
    if (mean_entropy > h_of_mean + 1e-12)
        throw ValidationError("mean_entropy",
                              "E[h(phi)] exceeds h(E[phi]); the moments cannot come from one law");
    ctx.lambda = lambda;
    ctx.noise = "depolarizing";
    ctx.d = 2;
    ctx.timing_known = false;
    CapacityContext up_ctx = ctx;
    auto lower = detail::make_estimate(lambda * (1.0 - h_of_mean), Method::LowerBound, 0.0,
                                       std::move(ctx));
    auto upper = detail::make_estimate(lambda * (1.0 - mean_entropy), Method::UpperBound, 0.0,
                                       std::move(up_ctx));
    if (lower.value > upper.value) lower.value = upper.value; // FP guard at Jensen equality
    return {lower, upper};
}

// ---------------------------------------------------------------------------
// Qudit formulas
// ---------------------------------------------------------------------------

// Erasure: C_d = lambda * log2(d) * E[1-p(W)].
// Depolarizing: C_d = lambda * E[chi_d(p(W))] with the moment supplied by the
// caller (trace average or waiting-law quadrature of qudit_depolarizing_chi).
inline CapacityEstimate qudit_capacities(double lambda, int d, NoiseKind kind, double moment,
                                         CapacityContext ctx = {}) {
    if (d < 2) throw ValidationError("d", "dimension must be >= 2");
    if (!(lambda > 0.0)) throw ValidationError("lambda", "arrival rate must be positive");
    const double log2d = std::log2(double(d));
    ctx.lambda = lambda;
    ctx.d = d;
    ctx.noise = kind == NoiseKind::Erasure ? "erasure" : "depolarizing";
    if (kind == NoiseKind::Erasure) {
        if (!(moment >= 0.0 && moment <= 1.0))
            throw ValidationError("moment", "E[1-p(W)] must lie in [0,1]");
        return detail::make_estimate(lambda * log2d * moment, Method::Analytic, 0.0,
                                     std::move(ctx));
    }
    if (!(moment >= 0.0 && moment <= log2d + 1e-12))
        throw ValidationError("moment", "E[chi_d] must lie in [0, log2 d]");
    return detail::make_estimate(lambda * moment, Method::Analytic, 0.0, std::move(ctx));
}

// ---------------------------------------------------------------------------
// Single-letter upper bound from per-symbol Holevo values
// ---------------------------------------------------------------------------

// C <= lambda * mean(chi(N_W)) regardless of receiver knowledge. Takes the
// per-symbol chi sequence so the batch-means machinery matches the Monte
// Carlo estimators sample for sample (the erasure/depolarizing-with-timing
// bounds are tight: identical functionals give identical numbers).
inline CapacityEstimate additive_upper_bound(double lambda, std::span<const double> chi_values,
                                             int d = 2, CapacityContext ctx = {}) {
    if (!(lambda > 0.0)) throw ValidationError("lambda", "arrival rate must be positive");
    if (d < 2) throw ValidationError("d", "dimension must be >= 2");
    if (chi_values.empty()) throw ValidationError("chi_values", "empty sequence");
    const double log2d = std::log2(double(d));
    for (double c : chi_values)
        if (!(c >= 0.0 && c <= log2d + 1e-12))
            throw ValidationError("chi_values", "chi value " + std::to_string(c) +
                                                    " outside [0, log2 d]");
    MeanEstimate m = batch_means(chi_values);
    ctx.lambda = lambda;
    ctx.d = d;
    return detail::make_estimate(lambda * m.mean, Method::UpperBound, lambda * m.std_error,
                                 std::move(ctx));
}

// ---------------------------------------------------------------------------
// Stationary waiting-law expectations (analytic reference values)
// ---------------------------------------------------------------------------

// E[f(W)] for the true M/M/1 stationary law at arrival rate lambda (unit
// service rate): Delay has an atom 1-lambda at zero plus an Exp(1-lambda)
// tail of mass lambda; Sojourn is Exp(1-lambda) outright.
template <class F>
inline double mm1_waiting_expectation(F&& f, double lambda, WaitingConvention convention,
                                      double rel_tol = 1e-8) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw ValidationError("lambda", "need 0 < lambda < 1");
    const double tail = exp_law_expectation(f, 1.0 - lambda, rel_tol).checked(rel_tol);
    if (convention == WaitingConvention::Sojourn) return tail;
    return (1.0 - lambda) * f(0.0) + lambda * tail;
}

// E[f(W)] under the posited general-p route law W ~ Exp((1-lambda)/lambda).
template <class F>
inline double posited_waiting_expectation(F&& f, double lambda, double rel_tol = 1e-8) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw ValidationError("lambda", "need 0 < lambda < 1");
    return exp_law_expectation(f, (1.0 - lambda) / lambda, rel_tol).checked(rel_tol);
}

} // namespace qcap
