#pragma once

// Shared basic types and error classes for the sum-of-minimum library.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace som {

using Vec = std::vector<double>;

// Thrown on malformed arguments (dimension mismatches, out-of-range ids, ...).
struct invalid_input : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown on inconsistent solver/experiment configuration.
struct invalid_config : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown when an operation needs oracle data (minimizer, optimal value,
// gradient) that the sub-function does not provide.
struct unsupported_oracle : std::logic_error {
    using std::logic_error::logic_error;
};

// Thrown when an instance degenerates at runtime, e.g. every seeding score
// vanishes or a data vector is identically zero.
struct degenerate_instance : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline bool all_finite(const Vec& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

inline double vec_dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double vec_norm_sq(const Vec& a) { return vec_dot(a, a); }

inline double vec_norm(const Vec& a) { return std::sqrt(vec_norm_sq(a)); }

inline double vec_dist_sq(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

// y += alpha * x
inline void vec_axpy(double alpha, const Vec& x, Vec& y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline void vec_scale(Vec& x, double alpha) {
    for (double& v : x) v *= alpha;
}

inline Vec vec_sub(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

}  // namespace som
