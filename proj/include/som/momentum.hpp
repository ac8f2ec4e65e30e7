#pragma once

// Momentum Lloyd's algorithm.  Parameters move along an accumulated momentum
// direction; reclassification happens at the extrapolated acceleration
// points u_j = (x^{t+1} - beta x^t) / (1 - beta) and is size-controlled: the
// indices are revisited one by one in random order, and the sweep stops as
// soon as any cluster size leaves the factor-alpha band around its size at
// the previous refresh.

#include <chrono>

#include "core.hpp"
#include "lloyd.hpp"
#include "rng.hpp"

namespace som {

struct momentum_config {
    double gamma = 1e-2;             // step size, > 0
    double beta = 0.5;               // momentum factor, in (0, 1)
    double alpha = 1.25;             // size-control factor, > 1
    std::size_t reclass_period = 1;  // r
    std::size_t max_iters = 100;

    void validate() const {
        if (!(gamma > 0.0)) throw invalid_config("momentum: gamma must be positive");
        if (!(beta > 0.0 && beta < 1.0)) throw invalid_config("momentum: beta must lie in (0,1)");
        if (!(alpha > 1.0)) throw invalid_config("momentum: alpha must exceed 1");
        if (!(alpha * beta < 1.0)) throw invalid_config("momentum: requires alpha * beta < 1");
        if (reclass_period == 0) throw invalid_config("momentum: reclass period must be >= 1");
        if (max_iters == 0) throw invalid_config("momentum: max_iters must be >= 1");
    }
};

/// Step-size bound under which the momentum convergence rate holds:
/// min( (1-beta)/(2L), (1-beta)^{3/2} (1-alpha beta)^{1/2} / (2 alpha^{1/2} L beta) ).
inline double gamma_bar(double alpha, double beta, double L) {
    if (!(alpha > 1.0) || !(beta > 0.0 && beta < 1.0) || !(L > 0.0))
        throw invalid_config("gamma_bar: requires alpha > 1, beta in (0,1), L > 0");
    if (!(alpha * beta < 1.0)) throw invalid_config("gamma_bar: requires alpha * beta < 1");
    const double first = (1.0 - beta) / (2.0 * L);
    const double second = std::pow(1.0 - beta, 1.5) * std::sqrt(1.0 - alpha * beta) /
                          (2.0 * std::sqrt(alpha) * L * beta);
    return std::min(first, second);
}

/**
 * @brief One-by-one controlled reclassification.
 *
 * Visits the indices in a uniformly random order, reassigning each to the
 * cluster whose u-parameter gives the smallest value (lowest index on
 * ties).  After every changed assignment all cluster sizes are checked
 * against the band [|C_j|/alpha, alpha |C_j|] taken at `current`; on the
 * first violation the sweep stops and the configuration before the
 * offending move is returned.  Reference clusters that were empty are
 * exempt from the upper bound so they can acquire members at all.
 */
inline partition controlled_reclassify(const partition& current, const std::vector<Vec>& u_params,
                                       const problem& prob, double alpha, rng& gen) {
    if (!(alpha > 1.0)) throw invalid_config("controlled_reclassify: alpha must exceed 1");
    detail::check_params(u_params, prob);
    if (current.assignment.size() != prob.size() || current.k != u_params.size())
        throw invalid_input("controlled_reclassify: partition shape mismatch");

    const std::vector<std::size_t> ref_sizes = current.sizes();
    partition part = current;
    std::vector<std::size_t> sizes = ref_sizes;

    std::vector<std::size_t> order(prob.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    gen.shuffle(order);

    auto within_band = [&](const std::vector<std::size_t>& s) {
        for (std::size_t j = 0; j < s.size(); ++j) {
            const double ref = static_cast<double>(ref_sizes[j]);
            const double now = static_cast<double>(s[j]);
            if (now * alpha < ref) return false;           // below ref/alpha
            if (ref > 0.0 && now > alpha * ref) return false;
        }
        return true;
    };

    for (std::size_t i : order) {
        const sub_function& f = *prob.oracles[i];
        std::size_t best_j = 0;
        double best = f.value(u_params[0]);
        for (std::size_t j = 1; j < u_params.size(); ++j) {
            const double v = f.value(u_params[j]);
            if (v < best) {
                best = v;
                best_j = j;
            }
        }
        if (best_j == part.assignment[i]) continue;
        const std::size_t old_j = part.assignment[i];
        --sizes[old_j];
        ++sizes[best_j];
        if (!within_band(sizes)) {
            ++sizes[old_j];
            --sizes[best_j];
            return part;  // last configuration that satisfied the band
        }
        part.assignment[i] = best_j;
    }
    return part;
}

struct momentum_result {
    std::vector<Vec> params;
    partition part;
    run_trace trace;
};

// Optional capture of the internal iterates, for inspection and tests.
struct momentum_debug {
    std::vector<std::vector<Vec>> x, m, u;
};

/**
 * @brief Runs momentum Lloyd's algorithm for cfg.max_iters iterations.
 *
 * Trace row 0 holds the state at the initial parameters; row t >= 1 records
 * F(x^{(t)}) and the weighted gradient norms of the group objectives used
 * in the t-th momentum update, so the momentum convergence bound can be
 * checked directly on rows 1..T.
 */
inline momentum_result momentum_run(const problem& prob, std::vector<Vec> params,
                                    const momentum_config& cfg, rng& gen,
                                    momentum_debug* debug = nullptr) {
    detail::check_params(params, prob);
    cfg.validate();
    if (!prob.kind.is_vector())
        throw invalid_config("momentum: requires vector parameters with gradients");
    const auto start = std::chrono::steady_clock::now();
    const std::size_t k = params.size();

    partition part = reclassify(params, prob);
    std::vector<Vec> momenta(k, Vec(prob.kind.flat_size(), 0.0));

    momentum_result out;
    {
        const auto grads = detail::group_gradients(part, params, prob);
        out.trace.rows.push_back({0, evaluate_objective(params, prob),
                                  detail::weighted_grad_sq(grads, part.sizes(), prob.size()),
                                  part.sizes(), detail::elapsed_s(start)});
    }
    if (debug) {
        debug->x.push_back(params);
        debug->m.push_back(momenta);
    }

    for (std::size_t t = 0; t < cfg.max_iters; ++t) {
        std::vector<Vec> next = params;
        for (std::size_t j = 0; j < k; ++j) vec_axpy(-cfg.gamma, momenta[j], next[j]);

        if (t % cfg.reclass_period == 0) {
            std::vector<Vec> u(k);
            for (std::size_t j = 0; j < k; ++j) {
                u[j].resize(next[j].size());
                for (std::size_t c = 0; c < next[j].size(); ++c)
                    u[j][c] = (next[j][c] - cfg.beta * params[j][c]) / (1.0 - cfg.beta);
            }
            part = controlled_reclassify(part, u, prob, cfg.alpha, gen);
            if (debug) debug->u.push_back(u);
        }

        const auto grads = detail::group_gradients(part, next, prob);
        for (std::size_t j = 0; j < k; ++j) {
            vec_scale(momenta[j], cfg.beta);
            vec_axpy(1.0, grads[j], momenta[j]);
        }
        params = std::move(next);
        out.trace.rows.push_back({t + 1, evaluate_objective(params, prob),
                                  detail::weighted_grad_sq(grads, part.sizes(), prob.size()),
                                  part.sizes(), detail::elapsed_s(start)});
        if (debug) {
            debug->x.push_back(params);
            debug->m.push_back(momenta);
        }
    }

    out.params = std::move(params);
    out.part = part;
    return out;
}

}  // namespace som
