#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qcap/capacity.hpp"
#include "qcap/decoherence.hpp"
#include "qcap/entropy.hpp"
#include "qcap/errors.hpp"
#include "qcap/queue_sim.hpp"
#include "qcap/stats.hpp"

namespace qcap {

// The stationary moments the capacity formulas consume. All map a waiting
// time into [0,1]:
//   Survival      1 - p(W)
//   Transform     e^{-kappa W}   (equals Survival for exponential decay)
//   EntropyOfHalfP h(p(W)/2)
//   Phi           p(W)/2
//   EntropyOfPhi  h(p(W)/2) of the induced-BSC crossover, averaged per sample
enum class MomentFunctional { Survival, Transform, EntropyOfHalfP, Phi, EntropyOfPhi };

struct MomentRequest {
    MomentFunctional functional;
    DecoherenceModel model;
};

namespace detail {
template <class F>
inline MeanEstimate moment_over(const EventTrace& trace, F&& f) {
    return stationary_mean(trace, std::forward<F>(f));
}
} // namespace detail

// Batch-means plug-in estimate of the requested functional over the
// post-warmup waiting times.
inline MeanEstimate estimate_moment(const EventTrace& trace, const MomentRequest& req) {
    const auto& model = req.model;
    switch (req.functional) {
        case MomentFunctional::Survival:
            return detail::moment_over(trace, [&model](double w) { return 1.0 - model.p(w); });
        case MomentFunctional::Transform: {
            const auto* e = std::get_if<ExpDecay>(&model.p_map.raw());
            if (!e)
                throw ValidationError("functional",
                                      "Transform moment needs an exponential-decay p-map");
            const double kappa = e->kappa;
            return detail::moment_over(trace, [kappa](double w) { return std::exp(-kappa * w); });
        }
        case MomentFunctional::EntropyOfHalfP:
        case MomentFunctional::EntropyOfPhi:
            // phi(w) = p(w)/2, so both are h(p(W)/2); kept as separate tags
            // because the formulas they feed differ.
            return detail::moment_over(
                trace, [&model](double w) { return binary_entropy(0.5 * model.p(w)); });
        case MomentFunctional::Phi:
        default:
            return detail::moment_over(trace, [&model](double w) { return 0.5 * model.p(w); });
    }
}

// Monte Carlo capacity estimate(s) from one trace. `secondary` is only
// populated for the timing-blind depolarizing case, where the result is a
// (lower, upper) pair rather than a point value.
struct McCapacityResult {
    CapacityEstimate primary;
    std::optional<CapacityEstimate> secondary;
};

inline McCapacityResult mc_capacity(const EventTrace& trace, const DecoherenceModel& model,
                                    double lambda, bool timing_known = true) {
    if (!(lambda > 0.0)) throw ValidationError("lambda", "arrival rate must be positive");

    CapacityContext ctx;
    ctx.lambda = lambda;
    ctx.d = model.d;
    ctx.noise = to_string(model.kind);
    ctx.p_map = model.p_map.describe();
    ctx.timing_known = timing_known;
    ctx.waiting_law = std::string("trace(") + to_string(trace.convention) + ")";

    if (model.kind == NoiseKind::Erasure) {
        // lambda * E[1-p(W)]; receiver timing knowledge is irrelevant here.
        MeanEstimate m = estimate_moment(trace, {MomentFunctional::Survival, model});
        const double scale = model.d == 2 ? 1.0 : std::log2(double(model.d));
        return {detail::make_estimate(lambda * scale * m.mean, Method::MonteCarlo,
                                      lambda * scale * m.std_error, std::move(ctx)),
                std::nullopt};
    }

    if (model.d != 2)
        throw ValidationError("d", "Monte Carlo depolarizing estimation is implemented for d=2");

    if (timing_known) {
        // Averages 1 - h(p(W)/2) sample-wise (not 1 - average of h): the same
        // per-symbol chi functional the single-letter upper bound uses, so
        // the two agree to the last bit where the bound is tight.
        MeanEstimate m = detail::moment_over(
            trace, [&model](double w) { return 1.0 - binary_entropy(0.5 * model.p(w)); });
        return {detail::make_estimate(lambda * m.mean, Method::MonteCarlo, lambda * m.std_error,
                                      std::move(ctx)),
                std::nullopt};
    }

    // Timing-blind: lower bound through h(E[phi]) with a delta-method SE,
    // upper bound through E[h(phi)].
    MeanEstimate phi = estimate_moment(trace, {MomentFunctional::Phi, model});
    MeanEstimate ent = estimate_moment(trace, {MomentFunctional::EntropyOfPhi, model});
    auto [lower, upper] = bsc_bounds_no_timing(lambda, phi.mean, ent.mean, ctx);
    if (phi.std_error > 0.0 && phi.mean > 0.0 && phi.mean < 0.5)
        lower.std_error = lambda * std::abs(binary_entropy_derivative(phi.mean)) * phi.std_error;
    upper.std_error = lambda * ent.std_error;
    return {lower, upper};
}

// Guard for cross-trace comparisons: estimates taken under different waiting
// conventions must never be merged or differenced silently.
inline void require_same_convention(const EventTrace& a, const EventTrace& b) {
    if (a.convention != b.convention)
        throw ValidationError("convention", std::string("cannot compare traces recorded under '") +
                                                to_string(a.convention) + "' and '" +
                                                to_string(b.convention) + "' conventions");
}

} // namespace qcap
