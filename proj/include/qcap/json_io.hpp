#pragma once

#include <charconv>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qcap/capacity.hpp"
#include "qcap/coding.hpp"
#include "qcap/decoherence.hpp"
#include "qcap/distributions.hpp"
#include "qcap/errors.hpp"

namespace qcap {

using nlohmann::json;

// --- distribution specs ----------------------------------------------------
// {"kind":"exp","rate":1}            {"kind":"det","value":2}
// {"kind":"erlang","shape":2,"rate":2}
// {"kind":"hyper","weights":[..],"rates":[..]}
// {"kind":"uniform","lo":0,"hi":2}   {"kind":"empirical","samples":[..]}

inline json to_json(const DistributionSpec& spec) {
    json j;
    std::visit(
        [&j](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Exponential>) {
                j = {{"kind", "exp"}, {"rate", d.rate}};
            } else if constexpr (std::is_same_v<T, Deterministic>) {
                j = {{"kind", "det"}, {"value", d.value}};
            } else if constexpr (std::is_same_v<T, Erlang>) {
                j = {{"kind", "erlang"}, {"shape", d.shape}, {"rate", d.rate}};
            } else if constexpr (std::is_same_v<T, HyperExponential>) {
                j = {{"kind", "hyper"}, {"weights", d.weights}, {"rates", d.rates}};
            } else if constexpr (std::is_same_v<T, Uniform>) {
                j = {{"kind", "uniform"}, {"lo", d.lo}, {"hi", d.hi}};
            } else {
                j = {{"kind", "empirical"}, {"samples", d.samples}};
            }
        },
        spec.raw());
    return j;
}

namespace detail {
inline double field_number(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number())
        throw ValidationError(key, "missing or non-numeric field");
    return j[key].get<double>();
}
} // namespace detail

inline DistributionSpec distribution_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        throw ValidationError("kind", "distribution object needs a string 'kind'");
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "exp") return DistributionSpec(Exponential{detail::field_number(j, "rate")});
    if (kind == "det") return DistributionSpec(Deterministic{detail::field_number(j, "value")});
    if (kind == "erlang") {
        const double shape = detail::field_number(j, "shape");
        if (shape != double(int(shape))) throw ValidationError("shape", "must be an integer");
        return DistributionSpec(Erlang{int(shape), detail::field_number(j, "rate")});
    }
    if (kind == "hyper") {
        if (!j.contains("weights") || !j.contains("rates"))
            throw ValidationError("weights", "hyper needs 'weights' and 'rates' arrays");
        return DistributionSpec(HyperExponential{j["weights"].get<std::vector<double>>(),
                                                 j["rates"].get<std::vector<double>>()});
    }
    if (kind == "uniform")
        return DistributionSpec(Uniform{detail::field_number(j, "lo"), detail::field_number(j, "hi")});
    if (kind == "empirical") {
        if (!j.contains("samples")) throw ValidationError("samples", "empirical needs 'samples'");
        return DistributionSpec(Empirical{j["samples"].get<std::vector<double>>()});
    }
    throw ValidationError("kind", "unknown distribution kind '" + kind + "'");
}

// Compact flag shorthand: "exp" | "exp:RATE" | "det" | "det:VALUE" |
// "erlang:SHAPE[:RATE]" (rate defaults to shape: unit mean) |
// "uniform:LO:HI" | "hyper:W1,W2,..:R1,R2,.." | "empirical:S1,S2,.."
inline DistributionSpec distribution_from_shorthand(const std::string& text) {
    auto split = [](const std::string& s, char sep) {
        std::vector<std::string> parts;
        std::size_t start = 0;
        while (true) {
            const auto pos = s.find(sep, start);
            parts.push_back(s.substr(start, pos - start));
            if (pos == std::string::npos) break;
            start = pos + 1;
        }
        return parts;
    };
    auto num = [](const std::string& s) {
        try {
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw ValidationError("distribution", "cannot parse number '" + s + "'");
        }
    };
    auto nums = [&](const std::string& s) {
        std::vector<double> out;
        for (const auto& part : split(s, ',')) out.push_back(num(part));
        return out;
    };

    const auto parts = split(text, ':');
    const std::string& kind = parts[0];
    const std::size_t argc = parts.size() - 1;
    if (kind == "exp") {
        if (argc > 1) throw ValidationError("distribution", "exp takes at most one parameter");
        return DistributionSpec(Exponential{argc ? num(parts[1]) : 1.0});
    }
    if (kind == "det") {
        if (argc > 1) throw ValidationError("distribution", "det takes at most one parameter");
        return DistributionSpec(Deterministic{argc ? num(parts[1]) : 1.0});
    }
    if (kind == "erlang") {
        if (argc < 1 || argc > 2)
            throw ValidationError("distribution", "erlang takes shape[:rate]");
        const double shape = num(parts[1]);
        if (shape != double(int(shape)) || shape < 1)
            throw ValidationError("shape", "must be a positive integer");
        return DistributionSpec(Erlang{int(shape), argc == 2 ? num(parts[2]) : shape});
    }
    if (kind == "uniform") {
        if (argc != 2) throw ValidationError("distribution", "uniform takes lo:hi");
        return DistributionSpec(Uniform{num(parts[1]), num(parts[2])});
    }
    if (kind == "hyper") {
        if (argc != 2) throw ValidationError("distribution", "hyper takes w1,w2,..:r1,r2,..");
        return DistributionSpec(HyperExponential{nums(parts[1]), nums(parts[2])});
    }
    if (kind == "empirical") {
        if (argc != 1) throw ValidationError("distribution", "empirical takes s1,s2,..");
        return DistributionSpec(Empirical{nums(parts[1])});
    }
    throw ValidationError("distribution", "unknown kind '" + kind + "'");
}

// --- p-maps ------------------------------------------------------------
// {"kind":"exp","kappa":x}  or  {"kind":"table","points":[[w,p],...]}

inline json to_json(const PMap& pm) {
    if (const auto* e = std::get_if<ExpDecay>(&pm.raw()))
        return {{"kind", "exp"}, {"kappa", e->kappa}};
    if (const auto* t = std::get_if<PTable>(&pm.raw())) {
        json pts = json::array();
        for (const auto& [w, p] : t->points) pts.push_back(json::array({w, p}));
        return {{"kind", "table"}, {"points", pts}};
    }
    return {{"kind", "custom"}};
}

inline PMap p_map_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        throw ValidationError("p_map", "p-map needs a string 'kind'");
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "exp") return PMap(ExpDecay{detail::field_number(j, "kappa")});
    if (kind == "table") {
        if (!j.contains("points") || !j["points"].is_array())
            throw ValidationError("points", "table p-map needs a 'points' array");
        PTable t;
        for (const auto& pt : j["points"]) {
            if (!pt.is_array() || pt.size() != 2)
                throw ValidationError("points", "each knot must be a [w, p] pair");
            t.points.emplace_back(pt[0].get<double>(), pt[1].get<double>());
        }
        return PMap(std::move(t));
    }
    throw ValidationError("p_map", "unknown p-map kind '" + kind + "'");
}

// --- results -----------------------------------------------------------

inline json to_json(const CapacityContext& c) {
    json j = {{"lambda", c.lambda}, {"noise", c.noise}, {"d", c.d},
              {"timing_known", c.timing_known}};
    if (!c.service.empty()) j["service"] = c.service;
    if (!c.p_map.empty()) j["p_map"] = c.p_map;
    if (!c.waiting_law.empty()) j["waiting_law"] = c.waiting_law;
    return j;
}

inline json to_json(const CapacityEstimate& e) {
    return {{"value", e.value},
            {"std_error", e.std_error},
            {"method", to_string(e.method)},
            {"context", to_json(e.context)}};
}

inline json to_json(const CodeExperimentReport& r) {
    return {{"n", r.n},
            {"k", r.k},
            {"multiplier", r.multiplier},
            {"trials", r.trials},
            {"successes", r.successes},
            {"rate_per_use", r.rate_per_use},
            {"mean_unerased_fraction", r.mean_unerased_fraction},
            {"per_trial_erasure_fraction", r.per_trial_erasure_fraction}};
}

// Shortest decimal that parses back to the same double: the repo-wide
// interchange format for CSV cells ("0.2" stays "0.2", never
// "0.20000000000000001", and every value round-trips exactly).
inline std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

} // namespace qcap
