#pragma once

#include <cmath>

#include "qcap/errors.hpp"

namespace qcap {

// x*log2(x) extended continuously to x=0.
inline double xlog2x(double x) noexcept { return x == 0.0 ? 0.0 : x * std::log2(x); }

// Binary entropy in bits: h(0)=h(1)=0, h(1/2)=1, symmetric about 1/2.
inline double binary_entropy(double x) {
    if (!(x >= 0.0 && x <= 1.0))
        throw ValidationError("x", "binary_entropy needs x in [0,1]");
    return -xlog2x(x) - xlog2x(1.0 - x);
}

// d/dx h(x) in bits, for delta-method error propagation.
inline double binary_entropy_derivative(double x) {
    if (!(x > 0.0 && x < 1.0))
        throw ValidationError("x", "binary_entropy_derivative needs x in (0,1)");
    return std::log2((1.0 - x) / x);
}

// Holevo information of a d-dimensional depolarizing channel with flip
// probability p, in bits:
//   log2(d) + (1-p+p/d) log2(1-p+p/d) + (d-1)(p/d) log2(p/d).
// Reduces to 1 - h(p/2) at d=2; equals 0 identically at p=1.
inline double qudit_depolarizing_chi(double p, int d) {
    if (d < 2) throw ValidationError("d", "dimension must be >= 2");
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("p", "flip probability must lie in [0,1]");
    const double q = p / double(d);
    return std::log2(double(d)) + xlog2x(1.0 - p + q) + double(d - 1) * xlog2x(q);
}

} // namespace qcap
