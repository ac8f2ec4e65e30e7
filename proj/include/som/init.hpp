#pragma once

// Seeding strategies: random Gaussian, uniform seeding over sub-function
// minimizers, and careful seeding, which samples index i_j with probability
// proportional to a score measuring how unresolved f_i is under the
// parameters selected so far.  With quadratic sub-functions the selection
// law is exactly k-means++.

#include <functional>

#include "core.hpp"
#include "rng.hpp"

namespace som {

/**
 * @brief Score used to weight index sampling in careful seeding.
 *
 * exact_gap       v_i = min_j (f_i(x_j) - f_i^*)          (needs f_i^*)
 * grad_norm       v_i = min_j |grad f_i(x_j)|^2
 * additive_noisy  v_i = max(min_j (f_i(x_j) - f_i^*) - epsilon, 0),
 *                 i.e. exact_gap against the perturbed estimate
 *                 f~* = f* + epsilon, clamped at zero
 * scaled_oracle   v_i = min_j O_v(i, x_j) for a caller-supplied oracle
 *                 promising c1 (f_i(x)-f_i^*) <= O_v <= c2 (f_i(x)-f_i^*)
 */
struct score_mode {
    enum class kind_t { exact_gap, grad_norm, additive_noisy, scaled_oracle };

    kind_t kind = kind_t::exact_gap;
    double epsilon = 0.0;  // additive_noisy
    double c1 = 0.0, c2 = 0.0;
    std::function<double(std::size_t, const Vec&)> oracle;  // scaled_oracle

    static score_mode exact_gap() { return {}; }
    static score_mode grad_norm() { return {kind_t::grad_norm, 0.0, 0.0, 0.0, nullptr}; }
    static score_mode additive_noisy(double epsilon) {
        if (!(epsilon >= 0.0)) throw invalid_config("score_mode: epsilon must be >= 0");
        return {kind_t::additive_noisy, epsilon, 0.0, 0.0, nullptr};
    }
    static score_mode scaled_oracle(std::function<double(std::size_t, const Vec&)> fn,
                                    double c1, double c2) {
        if (!(c1 > 0.0 && c1 <= c2)) throw invalid_config("score_mode: requires 0 < c1 <= c2");
        if (!fn) throw invalid_config("score_mode: missing oracle");
        return {kind_t::scaled_oracle, 0.0, c1, c2, std::move(fn)};
    }
};

/// Seeding output: the chosen parameters, the selected indices, and (for
/// careful seeding) the score and weight vectors of every sampling round.
struct init_result {
    std::vector<Vec> params;
    std::vector<std::size_t> indices;
    std::vector<Vec> score_history;   // v^{(j)}, rounds j = 2..k
    std::vector<Vec> weight_history;  // w^{(j)} = v^{(j)} / sum v^{(j)}
};

/// k i.i.d. standard Gaussian parameter vectors.
inline std::vector<Vec> init_random(const problem& prob, std::size_t k, rng& gen) {
    prob.validate();
    if (k == 0) throw invalid_input("init_random: k must be positive");
    if (!prob.kind.is_vector())
        throw invalid_config("init_random: frame parameters use careful seeding only");
    std::vector<Vec> params;
    params.reserve(k);
    for (std::size_t j = 0; j < k; ++j) params.push_back(gen.normal_vec(prob.kind.dim));
    return params;
}

namespace detail {
inline Vec require_minimizer(const problem& prob, std::size_t i) {
    const auto m = prob.oracles[i]->minimizer();
    if (!m) throw unsupported_oracle("seeding: oracle lacks a minimizer");
    return *m;
}
}  // namespace detail

/// k distinct indices drawn uniformly without replacement; parameters are
/// the corresponding sub-function minimizers.
inline init_result init_uniform_seeding(const problem& prob, std::size_t k, rng& gen) {
    prob.validate();
    if (k == 0) throw invalid_input("init_uniform_seeding: k must be positive");
    if (prob.size() < k) throw invalid_input("init_uniform_seeding: k exceeds N");
    init_result out;
    out.indices = gen.distinct_indices(prob.size(), k);
    for (std::size_t i : out.indices) out.params.push_back(detail::require_minimizer(prob, i));
    return out;
}

/// Scores v_i = min over the existing parameters, per the selected mode.
inline Vec compute_scores(const std::vector<Vec>& existing, const problem& prob,
                          const score_mode& mode) {
    if (existing.empty()) throw invalid_input("compute_scores: existing set is empty");
    detail::check_params(existing, prob);

    Vec scores(prob.size(), 0.0);
    for (std::size_t i = 0; i < prob.size(); ++i) {
        const sub_function& f = *prob.oracles[i];
        double best = 0.0;
        for (std::size_t j = 0; j < existing.size(); ++j) {
            double s = 0.0;
            switch (mode.kind) {
                case score_mode::kind_t::exact_gap: {
                    const auto fs = f.opt_value();
                    if (!fs) throw unsupported_oracle("compute_scores: exact_gap needs opt_value");
                    s = f.value(existing[j]) - *fs;
                    break;
                }
                case score_mode::kind_t::grad_norm:
                    s = vec_norm_sq(f.gradient(existing[j]));
                    break;
                case score_mode::kind_t::additive_noisy: {
                    const auto fs = f.opt_value();
                    if (!fs)
                        throw unsupported_oracle("compute_scores: additive_noisy needs opt_value");
                    s = std::max(f.value(existing[j]) - (*fs + mode.epsilon), 0.0);
                    break;
                }
                case score_mode::kind_t::scaled_oracle:
                    s = mode.oracle(i, existing[j]);
                    break;
            }
            best = (j == 0) ? s : std::min(best, s);
        }
        scores[i] = std::max(best, 0.0);  // exact gaps may round slightly negative
    }
    return scores;
}

/**
 * @brief Careful seeding: i_1 uniform, then each i_j sampled with
 * probability v_i / sum v, parameters set to the sub-function minimizers.
 *
 * Repeated selection of an index is permitted.  A round in which every
 * score vanishes reports a degenerate instance rather than guessing.
 */
inline init_result careful_seed(const problem& prob, std::size_t k, const score_mode& mode,
                                rng& gen) {
    prob.validate();
    if (k == 0) throw invalid_input("careful_seed: k must be positive");
    if (prob.size() < k) throw invalid_input("careful_seed: k exceeds N");

    init_result out;
    out.indices.push_back(gen.uniform_index(prob.size()));
    out.params.push_back(detail::require_minimizer(prob, out.indices[0]));

    for (std::size_t round = 1; round < k; ++round) {
        Vec v = compute_scores(out.params, prob, mode);
        double total = 0.0;
        for (double s : v) total += s;
        if (!(total > 0.0))
            throw degenerate_instance("careful_seed: all scores vanished in a round");
        Vec w(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) w[i] = v[i] / total;
        const std::size_t pick = gen.weighted_choice(v);
        out.indices.push_back(pick);
        out.params.push_back(detail::require_minimizer(prob, pick));
        out.score_history.push_back(std::move(v));
        out.weight_history.push_back(std::move(w));
    }
    return out;
}

}  // namespace som
