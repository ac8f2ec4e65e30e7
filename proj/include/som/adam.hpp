#pragma once

// Bias-corrected ADAM update, shared by the Lloyd solver (per-cluster group
// steps) and the per-sample approximate minimizer of the MLP family.

#include "common.hpp"

namespace som {

struct adam_config {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    void validate() const {
        if (!(lr > 0.0)) throw invalid_config("adam: lr must be positive");
        if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
            throw invalid_config("adam: moment factors must lie in [0, 1)");
    }
};

struct adam_state {
    Vec m, v;
    std::size_t t = 0;

    explicit adam_state(std::size_t dim = 0) : m(dim, 0.0), v(dim, 0.0) {}
};

/// One ADAM update; mutates the state and returns the step to add to x.
inline Vec adam_step(adam_state& state, const Vec& grad, const adam_config& cfg) {
    if (state.m.size() != grad.size()) throw invalid_input("adam_step: state dimension mismatch");
    ++state.t;
    const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
    const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
    Vec step(grad.size());
    for (std::size_t i = 0; i < grad.size(); ++i) {
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grad[i];
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
        const double m_hat = state.m[i] / c1;
        const double v_hat = state.v[i] / c2;
        step[i] = -cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
    }
    return step;
}

}  // namespace som
