#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qcap/errors.hpp"
#include "qcap/queue_sim.hpp"
#include "qcap/rng.hpp"

namespace qcap {

// p(w) = 1 - e^{-kappa w}: exponential loss of coherence while waiting.
struct ExpDecay {
    double kappa;
};

// Piecewise-linear p(w) through (w_i, p_i); clamped to p_0 before the first
// knot and to p_last beyond the final one, so p stays in [0,1] by
// construction.
struct PTable {
    std::vector<std::pair<double, double>> points;
};

// Arbitrary user function; outputs are range-checked at every call.
struct PCustom {
    std::function<double(double)> fn;
};

class PMap {
public:
    using Variant = std::variant<ExpDecay, PTable, PCustom>;

    PMap(ExpDecay d) : v_(check(d)) {}
    PMap(PTable d) : v_(check(std::move(d))) {}
    PMap(PCustom d) : v_(check(std::move(d))) {}

    const Variant& raw() const noexcept { return v_; }

    double operator()(double w) const {
        if (!(w >= 0.0)) throw ValidationError("w", "waiting time must be >= 0");
        if (const auto* e = std::get_if<ExpDecay>(&v_)) return -std::expm1(-e->kappa * w);
        if (const auto* t = std::get_if<PTable>(&v_)) return eval_table(t->points, w);
        const auto& fn = std::get<PCustom>(v_).fn;
        const double p = fn(w);
        if (!(p >= 0.0 && p <= 1.0))
            throw NumericalError("custom p-map returned " + std::to_string(p) + " at w=" +
                                 std::to_string(w) + ", outside [0,1]");
        return p;
    }

    std::string describe() const {
        if (const auto* e = std::get_if<ExpDecay>(&v_))
            return "exp-decay(kappa=" + std::to_string(e->kappa) + ")";
        if (const auto* t = std::get_if<PTable>(&v_))
            return "table(" + std::to_string(t->points.size()) + " knots)";
        return "custom";
    }

private:
    Variant v_;

    static ExpDecay check(ExpDecay d) {
        if (!(d.kappa > 0.0) || !std::isfinite(d.kappa))
            throw ValidationError("kappa", "decoherence rate must be positive and finite");
        return d;
    }
    static PTable check(PTable d) {
        if (d.points.empty()) throw ValidationError("points", "table p-map needs at least one knot");
        double prev_w = -1.0, prev_p = -1.0;
        for (const auto& [w, p] : d.points) {
            if (!(w >= 0.0) || !std::isfinite(w))
                throw ValidationError("points", "knot positions must be nonnegative and finite");
            if (w <= prev_w) throw ValidationError("points", "knot positions must be strictly increasing");
            if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("points", "knot values must lie in [0,1]");
            if (p < prev_p) throw ValidationError("points", "knot values must be nondecreasing");
            prev_w = w;
            prev_p = p;
        }
        return d;
    }
    static PCustom check(PCustom d) {
        if (!d.fn) throw ValidationError("fn", "custom p-map needs a callable");
        return d;
    }

    static double eval_table(const std::vector<std::pair<double, double>>& pts, double w) {
        if (w <= pts.front().first) return pts.front().second;
        if (w >= pts.back().first) return pts.back().second;
        auto hi = std::upper_bound(pts.begin(), pts.end(), w,
                                   [](double x, const auto& pt) { return x < pt.first; });
        auto lo = hi - 1;
        const double t = (w - lo->first) / (hi->first - lo->first);
        return lo->second + t * (hi->second - lo->second);
    }
};

enum class NoiseKind { Erasure, Depolarizing };

inline const char* to_string(NoiseKind k) noexcept {
    return k == NoiseKind::Erasure ? "erasure" : "depolarizing";
}

struct DecoherenceModel {
    PMap p_map;
    NoiseKind kind = NoiseKind::Erasure;
    int d = 2; // symbol alphabet size

    DecoherenceModel(PMap p, NoiseKind k = NoiseKind::Erasure, int dim = 2)
        : p_map(std::move(p)), kind(k), d(dim) {
        if (d < 2) throw ValidationError("d", "dimension must be >= 2");
    }

    double p(double w) const { return p_map(w); }
};

// Output sentinel for an erased symbol.
inline constexpr int kErased = -1;

struct SymbolStream {
    std::vector<int> input;            // X_j in {0..d-1}
    std::vector<int> output;           // Y_j in {0..d-1} or kErased
    std::vector<std::uint8_t> erased;  // per-symbol flags
    std::vector<std::uint8_t> flipped; // depolarizing only

    std::size_t size() const noexcept { return input.size(); }
    std::size_t erased_count() const {
        std::size_t c = 0;
        for (auto e : erased) c += e;
        return c;
    }
};

// Symbol-by-symbol channel given the waiting times: conditioned on W the
// noise factorizes, so each symbol draws independently.
//   Erasure:            Y = X w.p. 1-p(W), ERASED w.p. p(W)   (never wrong)
//   Depolarizing (d=2): Y = X xor B, B ~ Bernoulli(p(W)/2)
inline SymbolStream apply_channel(const DecoherenceModel& model, std::span<const int> inputs,
                                  std::span<const double> waits, Prng& noise) {
    if (inputs.size() != waits.size())
        throw ValidationError("inputs", "input length " + std::to_string(inputs.size()) +
                                            " != waiting-time length " + std::to_string(waits.size()));
    if (model.kind == NoiseKind::Depolarizing && model.d != 2)
        throw ValidationError("d", "depolarizing symbol simulation is implemented for d=2 only");

    SymbolStream out;
    out.input.assign(inputs.begin(), inputs.end());
    out.output.resize(inputs.size());
    out.erased.assign(inputs.size(), 0);
    out.flipped.assign(inputs.size(), 0);

    for (std::size_t j = 0; j < inputs.size(); ++j) {
        const int x = inputs[j];
        if (x < 0 || x >= model.d)
            throw ValidationError("inputs", "symbol " + std::to_string(x) + " outside alphabet {0.." +
                                                std::to_string(model.d - 1) + "}");
        const double p = model.p(waits[j]);
        const double u = noise.uniform01();
        if (model.kind == NoiseKind::Erasure) {
            if (u < p) {
                out.output[j] = kErased;
                out.erased[j] = 1;
            } else {
                out.output[j] = x;
            }
        } else {
            if (u < 0.5 * p) {
                out.output[j] = x ^ 1;
                out.flipped[j] = 1;
            } else {
                out.output[j] = x;
            }
        }
    }
    return out;
}

inline SymbolStream apply_channel(const DecoherenceModel& model, std::span<const int> inputs,
                                  const EventTrace& trace, Prng& noise) {
    return apply_channel(model, inputs,
                         std::span<const double>(trace.waiting.data(), trace.waiting.size()), noise);
}

} // namespace qcap
