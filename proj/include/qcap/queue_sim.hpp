#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "qcap/distributions.hpp"
#include "qcap/errors.hpp"
#include "qcap/rng.hpp"
#include "qcap/stats.hpp"

namespace qcap {

// Two waiting-time readings coexist in the queue-channel literature:
//   Delay   = time from arrival until service starts,
//   Sojourn = time from arrival until departure (delay + service).
// The closed-form capacity expressions match the *delay* transform, so Delay
// is the default; traces carry the tag so nothing downstream can silently mix
// the two.
enum class WaitingConvention { Delay, Sojourn };

inline const char* to_string(WaitingConvention c) noexcept {
    return c == WaitingConvention::Delay ? "delay" : "sojourn";
}

struct QueueConfig {
    double arrival_rate;            // lambda, symbols per unit time
    DistributionSpec inter_arrival; // mean must equal 1/lambda
    DistributionSpec service;
    WaitingConvention convention = WaitingConvention::Delay;
    std::int64_t n_symbols = 0;
    std::int64_t warmup = -1; // -1: default max(1e4, n/100), clamped to n-1
    std::uint64_t seed = 0;
};

struct EventTrace {
    std::vector<double> arrival;   // A_j, nondecreasing epochs
    std::vector<double> service;   // S_j
    std::vector<double> departure; // D_j, nondecreasing (FCFS)
    std::vector<double> waiting;   // W_j per the convention tag
    WaitingConvention convention = WaitingConvention::Delay;
    std::int64_t warmup = 0;

    std::size_t size() const noexcept { return waiting.size(); }
    std::span<const double> post_warmup_waiting() const {
        return {waiting.data() + warmup, waiting.size() - std::size_t(warmup)};
    }
};

inline std::int64_t default_warmup(std::int64_t n) {
    const std::int64_t w = std::max<std::int64_t>(10000, n / 100);
    return std::min(w, n - 1);
}

// FCFS single-server queue via the Lindley recursion
//   D_j = max(A_j, D_{j-1}) + S_j,
// starting from an empty system. Deterministic given the seed: the
// inter-arrival and service streams are independent children of it.
inline EventTrace simulate(const QueueConfig& cfg) {
    if (cfg.n_symbols < 1) throw ValidationError("n_symbols", "need at least one symbol");
    if (!(cfg.arrival_rate > 0.0)) throw ValidationError("arrival_rate", "must be positive");

    const double ia_mean = cfg.inter_arrival.mean();
    if (std::abs(ia_mean - 1.0 / cfg.arrival_rate) > 1e-9 * std::max(1.0, 1.0 / cfg.arrival_rate))
        throw ValidationError("inter_arrival",
                              "mean " + std::to_string(ia_mean) + " does not match 1/arrival_rate " +
                                  std::to_string(1.0 / cfg.arrival_rate));

    const double svc_mean = cfg.service.mean();
    if (!(cfg.arrival_rate < 1.0 / svc_mean))
        throw StabilityError("unstable queue: arrival_rate " + std::to_string(cfg.arrival_rate) +
                             " >= service rate " + std::to_string(1.0 / svc_mean));

    std::int64_t warmup = cfg.warmup;
    if (warmup < 0) warmup = default_warmup(cfg.n_symbols);
    if (warmup >= cfg.n_symbols)
        throw ValidationError("warmup", "warmup " + std::to_string(warmup) +
                                            " must be < n_symbols " + std::to_string(cfg.n_symbols));

    Prng arrivals(derive_seed(cfg.seed, 0));
    Prng services(derive_seed(cfg.seed, 1));

    const auto n = std::size_t(cfg.n_symbols);
    EventTrace tr;
    tr.arrival.resize(n);
    tr.service.resize(n);
    tr.departure.resize(n);
    tr.waiting.resize(n);
    tr.convention = cfg.convention;
    tr.warmup = warmup;

    // Delay-first Lindley recursion, driven by the arrival-epoch differences
    // actually stored in the trace:
    //   W_j = max(0, W_{j-1} + S_{j-1} - (A_j - A_{j-1})),  W_0 = 0.
    // The recursion, A/D monotonicity, D >= A+S, and the decomposition
    // sojourn = delay + service all hold bit-exactly on the emitted arrays;
    // sojourn = D - A holds to rounding (epochs grow, so differencing them
    // would smear the small waits).
    KahanSum clock; // compensated arrival epochs: no drift on long runs
    double prev_a = 0.0, prev_d = 0.0, prev_s = 0.0, prev_w = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        clock.add(cfg.inter_arrival.sample(arrivals));
        const double a = j == 0 ? clock.value() : std::max(prev_a, clock.value());
        const double s = cfg.service.sample(services);
        const double w = j == 0 ? 0.0 : std::max(0.0, prev_w + prev_s - (a - prev_a));
        const double d = std::max(prev_d, (a + w) + s);
        tr.arrival[j] = a;
        tr.service[j] = s;
        tr.departure[j] = d;
        tr.waiting[j] = cfg.convention == WaitingConvention::Delay ? w : w + s;
        prev_a = a;
        prev_d = d;
        prev_s = s;
        prev_w = w;
    }
    return tr;
}

// Time average of f(W) over the post-warmup tail, with a batch-means SE.
template <class F>
inline MeanEstimate stationary_mean(const EventTrace& trace, F&& f) {
    auto w = trace.post_warmup_waiting();
    if (w.size() < 20)
        throw ValidationError("trace", "need at least 20 post-warmup samples, got " +
                                           std::to_string(w.size()));
    std::vector<double> vals(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) vals[i] = f(w[i]);
    return batch_means(vals);
}

// CSV dump: header j,A,S,D,W; one row per symbol (warmup included); floats at
// 17 significant digits so rewrites are byte-identical.
inline void write_trace_csv(std::ostream& os, const EventTrace& trace) {
    os << "j,A,S,D,W\n";
    char buf[512];
    for (std::size_t j = 0; j < trace.size(); ++j) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g\n", j, trace.arrival[j],
                      trace.service[j], trace.departure[j], trace.waiting[j]);
        os << buf;
    }
}

} // namespace qcap
