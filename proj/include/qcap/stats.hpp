#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "qcap/errors.hpp"

namespace qcap {

struct MeanEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};

// Compensated (Kahan) accumulator; keeps epoch sums accurate over long runs.
class KahanSum {
public:
    void add(double x) noexcept {
        double y = x - c_;
        double t = sum_ + y;
        c_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const noexcept { return sum_; }

private:
    double sum_ = 0.0;
    double c_ = 0.0;
};

// Sample mean with a batch-means standard error. Queue outputs are
// autocorrelated, so the i.i.d. SE would understate the error; averaging
// within batches much longer than the correlation time restores an honest
// estimate. The mean is over all samples; the SE uses the first B*m of them
// (B batches of equal size m, any remainder ignored for the SE only).
inline MeanEstimate batch_means(std::span<const double> xs, std::size_t target_batches = 32) {
    const std::size_t n = xs.size();
    if (n < 20)
        throw ValidationError("samples", "batch-means needs at least 20 samples, got " + std::to_string(n));

    KahanSum total;
    for (double x : xs) total.add(x);
    const double mean = total.value() / double(n);

    const std::size_t b = std::min(target_batches, n); // >= 20 batches always
    const std::size_t m = n / b;
    double ss = 0.0;
    std::size_t idx = 0;
    for (std::size_t i = 0; i < b; ++i) {
        KahanSum batch;
        for (std::size_t j = 0; j < m; ++j) batch.add(xs[idx++]);
        const double d = batch.value() / double(m) - mean;
        ss += d * d;
    }
    // sd of batch means / sqrt(B), with B-1 in the denominator
    const double var_batch = ss / double(b - 1);
    return {mean, std::sqrt(var_batch / double(b))};
}

// Combine replication estimates by inverse-variance weighting. Exact
// (zero-SE) members force the plain average of the exact subset, which only
// arises for degenerate inputs.
inline MeanEstimate merge_inverse_variance(std::span<const MeanEstimate> parts) {
    if (parts.empty()) throw ValidationError("estimates", "nothing to merge");
    bool any_exact = false;
    for (const auto& p : parts) any_exact |= (p.std_error == 0.0);
    if (any_exact) {
        double s = 0.0;
        std::size_t c = 0;
        for (const auto& p : parts)
            if (p.std_error == 0.0) { s += p.mean; ++c; }
        return {s / double(c), 0.0};
    }
    double wsum = 0.0, msum = 0.0;
    for (const auto& p : parts) {
        const double w = 1.0 / (p.std_error * p.std_error);
        wsum += w;
        msum += w * p.mean;
    }
    return {msum / wsum, std::sqrt(1.0 / wsum)};
}

} // namespace qcap
