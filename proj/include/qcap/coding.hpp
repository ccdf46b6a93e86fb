#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qcap/decoherence.hpp"
#include "qcap/errors.hpp"
#include "qcap/estimator.hpp"
#include "qcap/queue_sim.hpp"
#include "qcap/rng.hpp"
#include "qcap/stats.hpp"

namespace qcap {

// Dense binary matrix, rows packed into 64-bit words; row operations are
// word-wide so elimination at n ~ 4000 runs in milliseconds.
class BitMatrix {
public:
    BitMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), wpr_((cols + 63) / 64), w_(rows * wpr_, 0) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t words_per_row() const noexcept { return wpr_; }

    bool get(std::size_t r, std::size_t c) const noexcept {
        return (w_[r * wpr_ + c / 64] >> (c % 64)) & 1u;
    }
    void set(std::size_t r, std::size_t c, bool v) noexcept {
        std::uint64_t& word = w_[r * wpr_ + c / 64];
        const std::uint64_t bit = std::uint64_t(1) << (c % 64);
        if (v)
            word |= bit;
        else
            word &= ~bit;
    }

    std::uint64_t* row(std::size_t r) noexcept { return w_.data() + r * wpr_; }
    const std::uint64_t* row(std::size_t r) const noexcept { return w_.data() + r * wpr_; }

    // dst ^= src, starting at word index `from` (leading words already zero).
    void xor_rows(std::size_t dst, std::size_t src, std::size_t from = 0) noexcept {
        std::uint64_t* d = row(dst);
        const std::uint64_t* s = row(src);
        for (std::size_t i = from; i < wpr_; ++i) d[i] ^= s[i];
    }

    void swap_rows(std::size_t a, std::size_t b) noexcept {
        if (a == b) return;
        std::uint64_t* pa = row(a);
        std::uint64_t* pb = row(b);
        for (std::size_t i = 0; i < wpr_; ++i) std::swap(pa[i], pb[i]);
    }

    void fill_random(Prng& rng) noexcept {
        const std::uint64_t mask =
            cols_ % 64 ? (std::uint64_t(1) << (cols_ % 64)) - 1 : ~std::uint64_t(0);
        for (std::size_t r = 0; r < rows_; ++r) {
            std::uint64_t* p = row(r);
            for (std::size_t i = 0; i < wpr_; ++i) p[i] = rng.next();
            p[wpr_ - 1] &= mask;
        }
    }

private:
    std::size_t rows_, cols_, wpr_;
    std::vector<std::uint64_t> w_;
};

// Random linear code (n, k). The generator is stored column-major (one packed
// k-bit row per codeword coordinate), which is the layout both encoding and
// erasure decoding consume; `generator()` materializes the conventional k x n
// matrix on demand.
class LinearCode {
public:
    LinearCode(std::size_t n, std::size_t k, std::uint64_t seed)
        : n_(n), k_(k), seed_(seed), columns_(n, std::max<std::size_t>(k, 1)) {
        if (k > n) throw ValidationError("k", "message length k must be <= block length n");
        if (n == 0) throw ValidationError("n", "block length must be positive");
        if (k > 0) {
            Prng rng(derive_seed(seed, 0xC0DE));
            columns_ = BitMatrix(n, k);
            columns_.fill_random(rng);
        }
    }

    std::size_t n() const noexcept { return n_; }
    std::size_t k() const noexcept { return k_; }
    std::uint64_t seed() const noexcept { return seed_; }
    const BitMatrix& columns() const noexcept { return columns_; }

    BitMatrix generator() const {
        BitMatrix g(std::max<std::size_t>(k_, 1), n_);
        for (std::size_t j = 0; j < n_; ++j)
            for (std::size_t i = 0; i < k_; ++i) g.set(i, j, columns_.get(j, i));
        return g;
    }

    // c_j = <message, column_j> over GF(2).
    std::vector<int> encode(std::span<const std::uint8_t> message) const {
        if (message.size() != k_)
            throw ValidationError("message", "message length " + std::to_string(message.size()) +
                                                 " != k " + std::to_string(k_));
        const std::size_t mw = columns_.words_per_row();
        std::vector<std::uint64_t> mrow(mw, 0);
        for (std::size_t i = 0; i < k_; ++i)
            if (message[i]) mrow[i / 64] |= std::uint64_t(1) << (i % 64);
        std::vector<int> cw(n_);
        for (std::size_t j = 0; j < n_; ++j) {
            const std::uint64_t* col = columns_.row(j);
            std::uint64_t acc = 0;
            for (std::size_t i = 0; i < mw; ++i) acc ^= col[i] & mrow[i];
            cw[j] = int(std::popcount(acc) & 1u);
        }
        return cw;
    }

private:
    std::size_t n_, k_;
    std::uint64_t seed_;
    BitMatrix columns_;
};

// Decode an erasure pattern: restrict the generator to the unerased
// coordinates and solve for the message by Gaussian elimination over GF(2).
// Returns the message iff it is uniquely determined (restricted rank == k and
// the system is consistent); nullopt otherwise. `received` holds 0/1 symbols
// with kErased marking erasures.
inline std::optional<std::vector<std::uint8_t>> solve_erasure(const LinearCode& code,
                                                              std::span<const int> received) {
    const std::size_t n = code.n(), k = code.k();
    if (received.size() != n)
        throw ValidationError("received", "received length " + std::to_string(received.size()) +
                                              " != n " + std::to_string(n));

    std::vector<std::size_t> unerased;
    unerased.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        if (received[j] == kErased) continue;
        if (received[j] != 0 && received[j] != 1)
            throw ValidationError("received", "symbols must be 0, 1, or erased");
        unerased.push_back(j);
    }
    const std::size_t ne = unerased.size();
    if (ne < k) return std::nullopt; // fewer equations than unknowns

    // Augmented system [G_E^T | y], one packed row per unerased coordinate.
    BitMatrix m(std::max<std::size_t>(ne, 1), k + 1);
    const std::size_t src_words = code.columns().words_per_row();
    for (std::size_t r = 0; r < ne; ++r) {
        const std::size_t j = unerased[r];
        std::copy_n(code.columns().row(j), k > 0 ? src_words : 0, m.row(r));
        if (received[j]) m.set(r, k, true);
    }

    // Forward elimination; every column must pivot for a unique solution.
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t pivot = ne;
        for (std::size_t r = c; r < ne; ++r)
            if (m.get(r, c)) {
                pivot = r;
                break;
            }
        if (pivot == ne) return std::nullopt; // free variable: solution not unique
        m.swap_rows(c, pivot);
        const std::size_t from = c / 64;
        for (std::size_t r = c + 1; r < ne; ++r)
            if (m.get(r, c)) m.xor_rows(r, c, from);
    }

    // Rows past the rank are now all-zero on the left; a set augmented bit
    // there means the equations were contradictory.
    for (std::size_t r = k; r < ne; ++r)
        if (m.get(r, k)) return std::nullopt;

    // Back-substitution on the upper-triangular top block.
    const std::size_t wpr = m.words_per_row();
    std::vector<std::uint64_t> sol(wpr, 0); // solution bits, augmented bit never set
    std::vector<std::uint8_t> message(k, 0);
    for (std::size_t ci = k; ci-- > 0;) {
        const std::uint64_t* rw = m.row(ci);
        std::uint64_t acc = 0;
        for (std::size_t i = ci / 64; i < wpr; ++i) acc ^= rw[i] & sol[i];
        const std::uint8_t bit = std::uint8_t((std::popcount(acc) & 1u) ^ std::uint64_t(m.get(ci, k)));
        message[ci] = bit;
        if (bit) sol[ci / 64] |= std::uint64_t(1) << (ci % 64);
    }
    return message;
}

// One end-to-end experiment: random message -> encode -> queue-channel
// erasures on n consecutive post-warmup waiting times -> rank-k decode.
inline bool erasure_code_trial(const LinearCode& code, const EventTrace& trace,
                               const DecoherenceModel& model, Prng& rng) {
    if (model.kind != NoiseKind::Erasure)
        throw ValidationError("model", "code trials run on the erasure channel");
    if (model.d != 2) throw ValidationError("d", "code trials are binary (d=2)");
    auto waits = trace.post_warmup_waiting();
    if (waits.size() < code.n())
        throw ValidationError("trace", "trace too short: " + std::to_string(waits.size()) +
                                           " post-warmup symbols < n = " + std::to_string(code.n()));

    std::vector<std::uint8_t> message(code.k());
    for (auto& b : message) b = std::uint8_t(rng.coin());
    const std::vector<int> cw = code.encode(message);
    SymbolStream stream = apply_channel(model, cw, waits.subspan(0, code.n()), rng);
    auto decoded = solve_erasure(code, stream.output);
    return decoded && std::equal(decoded->begin(), decoded->end(), message.begin(), message.end());
}

struct CodeExperimentReport {
    std::size_t n = 0;
    std::size_t k = 0;
    double multiplier = 0.0;
    int trials = 0;
    int successes = 0;
    std::vector<double> per_trial_erasure_fraction; // realized, one per trial
    double rate_per_use = 0.0;                      // k/n
    double mean_unerased_fraction = 0.0;            // 1 - expected erasure fraction
};

// For each rate multiplier m, run `trials` independent code experiments at
// k = round(m * n * (1-e)), where e is the expected erasure fraction of the
// n-symbol trace window (so k is fixed across trials: the code rate moves,
// the channel does not). Success frequency transitions from 1 to 0 near m=1.
inline std::vector<CodeExperimentReport> rate_sweep(std::size_t n,
                                                    std::span<const double> multipliers,
                                                    const EventTrace& trace,
                                                    const DecoherenceModel& model, int trials,
                                                    std::uint64_t seed) {
    if (trials < 1) throw ValidationError("trials", "need at least one trial");
    auto waits = trace.post_warmup_waiting();
    if (waits.size() < n)
        throw ValidationError("trace", "trace too short: " + std::to_string(waits.size()) +
                                           " post-warmup symbols < n = " + std::to_string(n));

    KahanSum psum;
    for (std::size_t j = 0; j < n; ++j) psum.add(model.p(waits[j]));
    const double e_hat = psum.value() / double(n);

    std::vector<CodeExperimentReport> reports;
    reports.reserve(multipliers.size());
    for (std::size_t mi = 0; mi < multipliers.size(); ++mi) {
        const double mult = multipliers[mi];
        if (!(mult >= 0.0)) throw ValidationError("multipliers", "rate multipliers must be >= 0");
        auto k = std::size_t(std::llround(mult * double(n) * (1.0 - e_hat)));
        if (k > n) k = n;

        CodeExperimentReport rep;
        rep.n = n;
        rep.k = k;
        rep.multiplier = mult;
        rep.trials = trials;
        rep.rate_per_use = double(k) / double(n);
        rep.mean_unerased_fraction = 1.0 - e_hat;
        rep.per_trial_erasure_fraction.reserve(std::size_t(trials));

        const std::uint64_t mseed = derive_seed(seed, 0x5EED0000ull + mi);
        for (int t = 0; t < trials; ++t) {
            LinearCode code(n, k, derive_seed(mseed, 2ull * std::uint64_t(t)));
            Prng trial_rng(derive_seed(mseed, 2ull * std::uint64_t(t) + 1ull));

            std::vector<std::uint8_t> message(k);
            for (auto& b : message) b = std::uint8_t(trial_rng.coin());
            const std::vector<int> cw = code.encode(message);
            SymbolStream stream = apply_channel(model, cw, waits.subspan(0, n), trial_rng);
            rep.per_trial_erasure_fraction.push_back(double(stream.erased_count()) / double(n));
            auto decoded = solve_erasure(code, stream.output);
            if (decoded && std::equal(decoded->begin(), decoded->end(), message.begin(), message.end()))
                ++rep.successes;
        }
        reports.push_back(std::move(rep));
    }
    return reports;
}

struct BscInformationEstimate {
    MeanEstimate per_use;       // 1 - mean h(phi(W)), with SE
    CapacityEstimate per_sec;   // lambda * per_use
};

// Plug-in information rate of the induced binary symmetric channel when the
// receiver knows the timing: per-use 1 - (1/n) sum h(phi(W_j)); the bits/sec
// figure shares the estimator-module implementation.
inline BscInformationEstimate bsc_information_estimate(const EventTrace& trace,
                                                       const DecoherenceModel& model,
                                                       double lambda) {
    if (model.kind != NoiseKind::Depolarizing)
        throw ValidationError("model", "BSC information estimate needs the depolarizing model");
    MeanEstimate ent = estimate_moment(trace, {MomentFunctional::EntropyOfPhi, model});
    McCapacityResult mc = mc_capacity(trace, model, lambda, true);
    return {{1.0 - ent.mean, ent.std_error}, mc.primary};
}

} // namespace qcap
