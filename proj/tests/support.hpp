#pragma once

// Shared test oracles, independent of the library's gradient/minimizer
// implementations.

#include <som/common.hpp>
#include <som/core.hpp>
#include <som/rng.hpp>

namespace test_support {

// Central finite differences of oracle->value, step 1e-6 * (1 + |x|).
inline som::Vec fd_gradient(const som::sub_function& f, const som::Vec& x) {
    const double h = 1e-6 * (1.0 + som::vec_norm(x));
    som::Vec g(x.size());
    som::Vec probe = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        probe[i] = xi + h;
        const double up = f.value(probe);
        probe[i] = xi - h;
        const double down = f.value(probe);
        probe[i] = xi;
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

inline double rel_error(const som::Vec& got, const som::Vec& want) {
    const double scale = std::max(som::vec_norm(want), 1e-12);
    return som::vec_norm(som::vec_sub(got, want)) / scale;
}

// 1-D quadratic instance (1/2)(x - c)^2 at the given centers.
inline std::vector<som::Vec> centers_1d(std::initializer_list<double> cs) {
    std::vector<som::Vec> out;
    for (double c : cs) out.push_back(som::Vec{c});
    return out;
}

}  // namespace test_support
