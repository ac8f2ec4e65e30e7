#pragma once

// Experiment metrics: permutation-maximal clustering accuracy, the
// success criterion for mixed regression, and the unregularized
// sum-of-minimum training loss for mixed nonlinear regression.

#include <algorithm>
#include <limits>

#include "datagen.hpp"
#include "models.hpp"

namespace som {

namespace detail {

// Minimum-cost assignment on a square cost matrix (Jonker-Volgenant style
// shortest augmenting paths).  Returns row -> column.
inline std::vector<std::size_t> min_cost_assignment(const mat& cost) {
    const std::size_t n = cost.rows;
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> match(n + 1, 0);  // column -> row, 1-based
    std::vector<std::size_t> way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        match[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, std::numeric_limits<double>::infinity());
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = match[j0];
            double delta = std::numeric_limits<double>::infinity();
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> row_to_col(n, 0);
    for (std::size_t j = 1; j <= n; ++j) row_to_col[match[j] - 1] = j - 1;
    return row_to_col;
}

}  // namespace detail

/**
 * @brief Maximal matching accuracy over all label permutations.
 *
 * Brute-force over the k! permutations for k <= 8 (the experiments use
 * k <= 6); above that, the optimal assignment on the k x k coincidence
 * matrix gives the identical maximum.
 */
inline double cluster_accuracy(const std::vector<std::size_t>& predicted,
                               const std::vector<std::size_t>& truth, std::size_t k) {
    if (predicted.size() != truth.size() || predicted.empty())
        throw invalid_input("cluster_accuracy: label length mismatch");
    if (k == 0) throw invalid_input("cluster_accuracy: k must be positive");
    mat counts(k, k);
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i] >= k || truth[i] >= k)
            throw invalid_input("cluster_accuracy: label out of range");
        counts(predicted[i], truth[i]) += 1.0;
    }

    double best = 0.0;
    if (k <= 8) {
        std::vector<std::size_t> perm(k);
        for (std::size_t j = 0; j < k; ++j) perm[j] = j;
        do {
            double hits = 0.0;
            for (std::size_t j = 0; j < k; ++j) hits += counts(j, perm[j]);
            best = std::max(best, hits);
        } while (std::next_permutation(perm.begin(), perm.end()));
    } else {
        mat cost(k, k);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) cost(i, j) = -counts(i, j);
        const auto assign = detail::min_cost_assignment(cost);
        for (std::size_t j = 0; j < k; ++j) best += counts(j, assign[j]);
    }
    return best / static_cast<double>(predicted.size());
}

/// Success iff the final objective is at or below the ground-truth
/// objective; the comparison is exact by definition.
inline bool mlr_success(double f_final, double f_ground_truth) {
    if (!std::isfinite(f_final) || !std::isfinite(f_ground_truth))
        throw invalid_input("mlr_success: non-finite objective");
    return f_final <= f_ground_truth;
}

/// (1/N) sum_i min_j (1/2)(psi(a_i; theta_j) - b_i)^2 -- no regularizer.
inline double min_loss(const labeled_dataset& ds, const std::vector<Vec>& thetas) {
    if (ds.family != "mnr") throw invalid_input("min_loss: dataset is not mnr");
    if (thetas.empty()) throw invalid_input("min_loss: empty parameter set");
    const mlp_dims dims{ds.dim, ds.hidden};
    for (const Vec& t : thetas)
        if (t.size() != dims.theta_size()) throw invalid_input("min_loss: theta size mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (const Vec& theta : thetas) {
            const double e = mlp_forward(theta, ds.inputs[i], dims) - ds.targets[i];
            best = std::min(best, 0.5 * e * e);
        }
        total += best;
    }
    return total / static_cast<double>(ds.size());
}

}  // namespace som
