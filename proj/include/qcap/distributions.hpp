#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "qcap/errors.hpp"
#include "qcap/rng.hpp"

namespace qcap {

struct Exponential {
    double rate;
};

struct Deterministic {
    double value;
};

struct Erlang {
    int shape;
    double rate;
};

struct HyperExponential {
    std::vector<double> weights;
    std::vector<double> rates;
};

struct Uniform {
    double lo;
    double hi;
};

struct Empirical {
    std::vector<double> samples; // kept sorted
};

// Inter-arrival / service law: sampling, exact mean, Laplace transform
// E[e^{-uS}]. Validated once at construction; immutable afterwards.
class DistributionSpec {
public:
    using Variant = std::variant<Exponential, Deterministic, Erlang, HyperExponential, Uniform, Empirical>;

    DistributionSpec(Exponential d) : v_(check(d)) {}
    DistributionSpec(Deterministic d) : v_(check(d)) {}
    DistributionSpec(Erlang d) : v_(check(d)) {}
    DistributionSpec(HyperExponential d) : v_(check(std::move(d))) {}
    DistributionSpec(Uniform d) : v_(check(d)) {}
    DistributionSpec(Empirical d) : v_(check(std::move(d))) {}

    const Variant& raw() const noexcept { return v_; }

    double sample(Prng& rng) const {
        return std::visit([&rng](const auto& d) { return sample_impl(d, rng); }, v_);
    }

    double mean() const {
        return std::visit([](const auto& d) { return mean_impl(d); }, v_);
    }

    // E[e^{-uS}], u > 0. Closed form for parametric kinds; plug-in sample
    // average for Empirical.
    double laplace(double u) const {
        if (!(u > 0.0)) throw ValidationError("u", "Laplace transform argument must be > 0");
        return std::visit([u](const auto& d) { return laplace_impl(d, u); }, v_);
    }

    // Smallest value the law can produce (used to rule out mass at zero).
    double min_support() const {
        return std::visit([](const auto& d) { return min_support_impl(d); }, v_);
    }

    std::string describe() const {
        return std::visit([](const auto& d) { return describe_impl(d); }, v_);
    }

private:
    Variant v_;

    static Exponential check(Exponential d) {
        require_positive_finite(d.rate, "rate");
        return d;
    }
    static Deterministic check(Deterministic d) {
        require_positive_finite(d.value, "value");
        return d;
    }
    static Erlang check(Erlang d) {
        if (d.shape < 1) throw ValidationError("shape", "Erlang shape must be a positive integer");
        require_positive_finite(d.rate, "rate");
        return d;
    }
    static HyperExponential check(HyperExponential d) {
        if (d.weights.empty() || d.weights.size() != d.rates.size())
            throw ValidationError("weights", "weights and rates must be nonempty and equally sized");
        double wsum = 0.0;
        for (double w : d.weights) {
            if (!(w >= 0.0) || !std::isfinite(w))
                throw ValidationError("weights", "weights must be nonnegative");
            wsum += w;
        }
        if (std::abs(wsum - 1.0) > 1e-12)
            throw ValidationError("weights", "weights must sum to 1 (tolerance 1e-12)");
        for (double r : d.rates) require_positive_finite(r, "rates");
        return d;
    }
    static Uniform check(Uniform d) {
        if (!std::isfinite(d.lo) || !std::isfinite(d.hi))
            throw ValidationError("lo", "Uniform bounds must be finite");
        if (d.lo < 0.0) throw ValidationError("lo", "Uniform lower bound must be >= 0");
        if (!(d.lo < d.hi))
            throw ValidationError("hi", "Uniform needs lo < hi (use Deterministic for a point mass)");
        return d;
    }
    static Empirical check(Empirical d) {
        if (d.samples.empty()) throw ValidationError("samples", "Empirical needs at least one sample");
        for (double s : d.samples)
            if (!(s >= 0.0) || !std::isfinite(s))
                throw ValidationError("samples", "Empirical samples must be nonnegative and finite");
        std::sort(d.samples.begin(), d.samples.end());
        if (!(mean_impl(d) > 0.0))
            throw ValidationError("samples", "Empirical mean must be positive");
        return d;
    }

    static void require_positive_finite(double x, const char* field) {
        if (!(x > 0.0) || !std::isfinite(x))
            throw ValidationError(field, "must be positive and finite");
    }

    static double sample_impl(const Exponential& d, Prng& rng) { return rng.exponential(d.rate); }
    static double sample_impl(const Deterministic& d, Prng&) { return d.value; }
    static double sample_impl(const Erlang& d, Prng& rng) {
        double s = 0.0;
        for (int i = 0; i < d.shape; ++i) s += rng.exponential(d.rate);
        return s;
    }
    static double sample_impl(const HyperExponential& d, Prng& rng) {
        const double u = rng.uniform01();
        double acc = 0.0;
        std::size_t pick = d.weights.size() - 1;
        for (std::size_t i = 0; i < d.weights.size(); ++i) {
            acc += d.weights[i];
            if (u < acc) {
                pick = i;
                break;
            }
        }
        return rng.exponential(d.rates[pick]);
    }
    static double sample_impl(const Uniform& d, Prng& rng) {
        return d.lo + (d.hi - d.lo) * rng.uniform01();
    }
    static double sample_impl(const Empirical& d, Prng& rng) {
        auto i = std::size_t(rng.uniform01() * double(d.samples.size()));
        if (i >= d.samples.size()) i = d.samples.size() - 1;
        return d.samples[i];
    }

    static double mean_impl(const Exponential& d) { return 1.0 / d.rate; }
    static double mean_impl(const Deterministic& d) { return d.value; }
    static double mean_impl(const Erlang& d) { return double(d.shape) / d.rate; }
    static double mean_impl(const HyperExponential& d) {
        double m = 0.0;
        for (std::size_t i = 0; i < d.weights.size(); ++i) m += d.weights[i] / d.rates[i];
        return m;
    }
    static double mean_impl(const Uniform& d) { return 0.5 * (d.lo + d.hi); }
    static double mean_impl(const Empirical& d) {
        double s = std::accumulate(d.samples.begin(), d.samples.end(), 0.0);
        return s / double(d.samples.size());
    }

    static double laplace_impl(const Exponential& d, double u) { return d.rate / (d.rate + u); }
    static double laplace_impl(const Deterministic& d, double u) { return std::exp(-u * d.value); }
    static double laplace_impl(const Erlang& d, double u) {
        return std::pow(d.rate / (d.rate + u), double(d.shape));
    }
    static double laplace_impl(const HyperExponential& d, double u) {
        double s = 0.0;
        for (std::size_t i = 0; i < d.weights.size(); ++i)
            s += d.weights[i] * d.rates[i] / (d.rates[i] + u);
        return s;
    }
    static double laplace_impl(const Uniform& d, double u) {
        // (e^{-u lo} - e^{-u hi}) / (u (hi - lo)), stable via expm1
        const double width = d.hi - d.lo;
        return std::exp(-u * d.lo) * (-std::expm1(-u * width)) / (u * width);
    }
    static double laplace_impl(const Empirical& d, double u) {
        double s = 0.0;
        for (double x : d.samples) s += std::exp(-u * x);
        return s / double(d.samples.size());
    }

    static double min_support_impl(const Exponential&) { return 0.0; }
    static double min_support_impl(const Deterministic& d) { return d.value; }
    static double min_support_impl(const Erlang&) { return 0.0; }
    static double min_support_impl(const HyperExponential&) { return 0.0; }
    static double min_support_impl(const Uniform& d) { return d.lo; }
    static double min_support_impl(const Empirical& d) { return d.samples.front(); }

    static std::string describe_impl(const Exponential& d) {
        return "exp(rate=" + fmt(d.rate) + ")";
    }
    static std::string describe_impl(const Deterministic& d) { return "det(" + fmt(d.value) + ")"; }
    static std::string describe_impl(const Erlang& d) {
        return "erlang(shape=" + std::to_string(d.shape) + ",rate=" + fmt(d.rate) + ")";
    }
    static std::string describe_impl(const HyperExponential& d) {
        std::string s = "hyper(w=[";
        for (std::size_t i = 0; i < d.weights.size(); ++i)
            s += (i ? "," : "") + fmt(d.weights[i]);
        s += "],r=[";
        for (std::size_t i = 0; i < d.rates.size(); ++i) s += (i ? "," : "") + fmt(d.rates[i]);
        return s + "])";
    }
    static std::string describe_impl(const Uniform& d) {
        return "uniform(" + fmt(d.lo) + "," + fmt(d.hi) + ")";
    }
    static std::string describe_impl(const Empirical& d) {
        return "empirical(n=" + std::to_string(d.samples.size()) + ")";
    }

    static std::string fmt(double x) {
        std::ostringstream os;
        os << x;
        return os.str();
    }
};

} // namespace qcap
