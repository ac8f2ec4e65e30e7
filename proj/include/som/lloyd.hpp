#pragma once

// Generalized Lloyd's algorithm: alternate reclassification (every r
// iterations) with one group update per cluster, where the update is a
// gradient step, the exact group minimizer, or one ADAM step.

#include <chrono>
#include <limits>

#include "adam.hpp"
#include "core.hpp"

namespace som {

enum class update_mode { gradient, exact_min, adam };

struct lloyd_config {
    update_mode mode = update_mode::gradient;
    double gamma = 1e-3;              // step size (gradient mode)
    std::size_t reclass_period = 1;   // r
    std::size_t max_iters = 100;      // update rounds
    bool stop_on_stable = false;      // break once F stops strictly decreasing
                                      // at a reclassification
    double target_objective = -std::numeric_limits<double>::infinity();
    adam_config adam;

    void validate(const problem& prob) const {
        if (reclass_period == 0) throw invalid_config("lloyd: reclass period must be >= 1");
        if (max_iters == 0) throw invalid_config("lloyd: max_iters must be >= 1");
        if (mode == update_mode::gradient || mode == update_mode::adam) {
            if (!prob.kind.is_vector())
                throw invalid_config("lloyd: gradient-based updates reject frame parameters");
        }
        if (mode == update_mode::gradient && !(gamma > 0.0))
            throw invalid_config("lloyd: step size must be positive");
        if (mode == update_mode::exact_min && !prob.group_minimizer)
            throw invalid_config("lloyd: exact_min needs a registered group minimizer");
        if (mode == update_mode::adam) adam.validate();
    }
};

struct lloyd_result {
    std::vector<Vec> params;
    partition part;
    run_trace trace;
    std::size_t iters_run = 0;  // completed update rounds
};

namespace detail {

// Per-cluster gradients of the group objectives; zero vectors for empty
// clusters, and skipped entirely for frame-valued parameters.
inline std::vector<Vec> group_gradients(const partition& part, const std::vector<Vec>& params,
                                        const problem& prob) {
    std::vector<Vec> grads(part.k, Vec(prob.kind.flat_size(), 0.0));
    std::vector<std::size_t> counts(part.k, 0);
    for (std::size_t i = 0; i < part.assignment.size(); ++i) {
        const std::size_t j = part.assignment[i];
        vec_axpy(1.0, prob.oracles[i]->gradient(params[j]), grads[j]);
        ++counts[j];
    }
    for (std::size_t j = 0; j < part.k; ++j)
        if (counts[j] > 0) vec_scale(grads[j], 1.0 / static_cast<double>(counts[j]));
    return grads;
}

inline double weighted_grad_sq(const std::vector<Vec>& grads,
                               const std::vector<std::size_t>& sizes, std::size_t n) {
    double s = 0.0;
    for (std::size_t j = 0; j < grads.size(); ++j)
        s += static_cast<double>(sizes[j]) / static_cast<double>(n) * vec_norm_sq(grads[j]);
    return s;
}

inline double elapsed_s(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace detail

/**
 * @brief Runs the generalized Lloyd iteration from the given parameters.
 *
 * Each iteration records objective, weighted gradient norms and cluster
 * sizes before the update, so convergence-rate bounds can be checked on the
 * trace afterwards.  Empty clusters keep their parameter unchanged.
 */
inline lloyd_result lloyd_run(const problem& prob, std::vector<Vec> params,
                              const lloyd_config& cfg) {
    detail::check_params(params, prob);
    cfg.validate(prob);
    const auto start = std::chrono::steady_clock::now();
    const std::size_t k = params.size();
    const bool vector_kind = prob.kind.is_vector();

    lloyd_result out;
    partition part;
    std::vector<adam_state> adam_states;
    if (cfg.mode == update_mode::adam)
        adam_states.assign(k, adam_state(prob.kind.flat_size()));

    double last_refresh_objective = std::numeric_limits<double>::infinity();

    for (std::size_t t = 0; t < cfg.max_iters; ++t) {
        const bool refresh = (t % cfg.reclass_period == 0);
        if (refresh) part = reclassify(params, prob);

        const double objective = evaluate_objective(params, prob);
        std::vector<Vec> grads;
        double wgrad = 0.0;
        if (vector_kind) {
            grads = detail::group_gradients(part, params, prob);
            wgrad = detail::weighted_grad_sq(grads, part.sizes(), prob.size());
        }
        out.trace.rows.push_back(
            {t, objective, wgrad, part.sizes(), detail::elapsed_s(start)});

        if (objective <= cfg.target_objective) break;
        if (refresh && cfg.stop_on_stable) {
            if (objective >= last_refresh_objective) break;
            last_refresh_objective = objective;
        }

        const auto clusters = part.clusters();
        for (std::size_t j = 0; j < k; ++j) {
            if (clusters[j].empty()) continue;
            switch (cfg.mode) {
                case update_mode::gradient:
                    vec_axpy(-cfg.gamma, grads[j], params[j]);
                    break;
                case update_mode::exact_min:
                    params[j] = prob.group_minimizer(clusters[j]);
                    break;
                case update_mode::adam:
                    vec_axpy(1.0, adam_step(adam_states[j], grads[j], cfg.adam), params[j]);
                    break;
            }
        }
        out.iters_run = t + 1;
    }

    out.params = std::move(params);
    out.part = part;
    return out;
}

}  // namespace som
