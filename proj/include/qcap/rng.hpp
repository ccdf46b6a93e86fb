#pragma once

#include <cmath>
#include <cstdint>

namespace qcap {

// splitmix64 finalizer (Vigna / Steele et al.); full-period bijection on u64.
inline std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Counter-based splitmix64 generator. One 64-bit state word, trivially
// seedable and splittable: every (seed, stream) pair is an independent
// reproducible stream, which is what lets replications rerun bit-exactly
// and lets a trace be reused with fresh noise.
class Prng {
public:
    explicit Prng(std::uint64_t seed = 0) noexcept : state_(seed) {}

    std::uint64_t next() noexcept {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix64(state_);
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() noexcept { return double(next() >> 11) * 0x1.0p-53; }

    // Inverse-CDF exponential; -log1p(-u) is finite for u in [0,1).
    double exponential(double rate) noexcept { return -std::log1p(-uniform01()) / rate; }

    // One bit.
    bool coin() noexcept { return (next() >> 63) != 0; }

private:
    std::uint64_t state_;
};

// Independent child stream: hash of (base, stream index). Used to split a
// user seed into arrival/service/noise streams and per-replication seeds.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept {
    return mix64(base + 0x9E3779B97F4A7C15ull * (stream + 1));
}

} // namespace qcap
