#pragma once

// Theory-facing diagnostics: the pairwise-spread quantity Delta_C, the
// gap/gradient aggregates A(I, M) and D(I, M), a brute-force optimum for
// tiny instances, the anisotropic simplex instance on which careful seeding
// is provably Omega((L^2/mu^2) ln k)-suboptimal, and the empirical
// initialization-bound experiment.

#include <algorithm>
#include <cmath>

#include "core.hpp"
#include "init.hpp"
#include "models.hpp"

namespace som {

/// Delta_C = (1/|C|) sum_{i,i' in C} |x_i^* - x_{i'}^*|^2.
inline double delta_C(const std::vector<std::size_t>& indices, const problem& prob) {
    if (indices.empty()) throw invalid_input("delta_C: empty index set");
    std::vector<Vec> mins;
    mins.reserve(indices.size());
    for (std::size_t i : indices) {
        const auto m = prob.oracles[i]->minimizer();
        if (!m) throw unsupported_oracle("delta_C: oracle lacks a minimizer");
        mins.push_back(*m);
    }
    double s = 0.0;
    for (const Vec& a : mins)
        for (const Vec& b : mins) s += vec_dist_sq(a, b);
    return s / static_cast<double>(indices.size());
}

/// A(I, M) = sum_{i in I} min_{z in M} (f_i(z) - f_i^*).
inline double gap_A(const std::vector<std::size_t>& indices, const std::vector<Vec>& point_set,
                    const problem& prob) {
    if (indices.empty()) throw invalid_input("gap_A: empty index set");
    if (point_set.empty()) throw invalid_input("gap_A: empty point set");
    double total = 0.0;
    for (std::size_t i : indices) {
        const sub_function& f = *prob.oracles[i];
        const auto fs = f.opt_value();
        if (!fs) throw unsupported_oracle("gap_A: oracle lacks opt_value");
        double best = f.value(point_set[0]);
        for (std::size_t j = 1; j < point_set.size(); ++j)
            best = std::min(best, f.value(point_set[j]));
        total += best - *fs;
    }
    return total;
}

/// D(I, M) = sum_{i in I} min_{z in M} |grad f_i(z)|^2.
inline double grad_D(const std::vector<std::size_t>& indices, const std::vector<Vec>& point_set,
                     const problem& prob) {
    if (indices.empty()) throw invalid_input("grad_D: empty index set");
    if (point_set.empty()) throw invalid_input("grad_D: empty point set");
    double total = 0.0;
    for (std::size_t i : indices) {
        const sub_function& f = *prob.oracles[i];
        double best = vec_norm_sq(f.gradient(point_set[0]));
        for (std::size_t j = 1; j < point_set.size(); ++j)
            best = std::min(best, vec_norm_sq(f.gradient(point_set[j])));
        total += best;
    }
    return total;
}

struct brute_force_result {
    double objective = 0.0;
    partition part;
};

/**
 * @brief Exact optimum by enumerating every assignment of N indices to k
 * clusters and solving each group in closed form.  Refuses when k^N > 1e7
 * or the problem has no registered group minimizer.
 */
inline brute_force_result brute_force_optimum(const problem& prob, std::size_t k) {
    prob.validate();
    if (k == 0) throw invalid_input("brute_force_optimum: k must be positive");
    if (!prob.group_minimizer)
        throw unsupported_oracle("brute_force_optimum: needs an exact group minimizer");
    const std::size_t n = prob.size();
    const double combos = std::pow(static_cast<double>(k), static_cast<double>(n));
    if (combos > 1e7)
        throw invalid_input("brute_force_optimum: k^N exceeds the 1e7 enumeration cap");

    std::vector<std::size_t> assign(n, 0);
    brute_force_result best;
    best.objective = std::numeric_limits<double>::infinity();

    while (true) {
        std::vector<std::vector<std::size_t>> clusters(k);
        for (std::size_t i = 0; i < n; ++i) clusters[assign[i]].push_back(i);
        double total = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            if (clusters[j].empty()) continue;
            const Vec x = prob.group_minimizer(clusters[j]);
            for (std::size_t i : clusters[j]) total += prob.oracles[i]->value(x);
        }
        total /= static_cast<double>(n);
        if (total < best.objective) {
            best.objective = total;
            best.part = partition{assign, k};
        }
        // next assignment in base-k counting order
        std::size_t pos = 0;
        while (pos < n && ++assign[pos] == k) assign[pos++] = 0;
        if (pos == n) break;
    }
    return best;
}

struct lower_bound_instance {
    problem prob;
    double f_star = 0.0;   // (1/N) sum f_i^* = 0 by construction
    double F_star = 0.0;   // optimal objective, in closed form
    std::size_t k = 0;
};

/**
 * @brief The k-simplex lower-bound instance: k clusters of n+1 anisotropic
 * quadratics in dimension 2k whose Hessian spectra live in {mu, L}.
 *
 * Cluster l sits at a simplex vertex with edge length m; its first n
 * members curve with mu except for an L-stiff coordinate centered at -1,
 * and the last member swaps the roles and centers that coordinate at +1.
 * All optimal values are zero and the per-cluster optimum costs exactly
 * 2 n L mu / (n L + mu).
 */
inline lower_bound_instance build_lower_bound_instance(std::size_t k, std::size_t n, double m,
                                                       double L, double mu) {
    if (k < 2) throw invalid_input("lower bound instance: k must be >= 2");
    if (n < 1) throw invalid_input("lower bound instance: n must be >= 1");
    if (!(mu > 0.0 && L >= mu)) throw invalid_input("lower bound instance: needs 0 < mu <= L");
    if (!(m >= 10.0 && m <= 1e6))
        throw invalid_input("lower bound instance: edge length must lie in [10, 1e6] "
                            "(the proof regime m = exp(n) is not representable)");

    const std::size_t dim = 2 * k;
    // Simplex vertices in the first k coordinates: scaled, centered e_l.
    const double scale = m / std::sqrt(2.0);
    std::vector<Vec> centers;
    std::vector<Vec> curvatures;
    for (std::size_t l = 0; l < k; ++l) {
        Vec vertex(dim, 0.0);
        for (std::size_t c = 0; c < k; ++c)
            vertex[c] = scale * ((c == l ? 1.0 : 0.0) - 1.0 / static_cast<double>(k));
        for (std::size_t i = 0; i < n + 1; ++i) {
            const bool flipped = (i == n);
            Vec center = vertex;
            Vec curve(dim, flipped ? L : mu);
            center[k + l] = flipped ? 1.0 : -1.0;
            curve[k + l] = flipped ? mu : L;
            centers.push_back(std::move(center));
            curvatures.push_back(std::move(curve));
        }
    }

    lower_bound_instance out;
    out.prob = make_diag_quad_problem(centers, curvatures);
    out.prob.L = L;
    out.prob.mu = mu;
    out.k = k;
    out.f_star = 0.0;
    const double nd = static_cast<double>(n);
    out.F_star = (2.0 * nd * L * mu / (nd * L + mu)) / static_cast<double>(n + 1);
    return out;
}

struct ratio_stats {
    double mean = 0.0;
    double stderr_mean = 0.0;
    double min = 0.0;
    double median = 0.0;
    double max = 0.0;
    double ceiling = 0.0;  // 4 (2 + ln k) (L^2/mu^2 + L/mu)
    std::size_t trials = 0;
};

/// Upper bound on the expected initialization ratio for a smooth,
/// strongly convex instance.
inline double init_ratio_ceiling(std::size_t k, double L, double mu) {
    const double c = L / mu;
    return 4.0 * (2.0 + std::log(static_cast<double>(k))) * (c * c + c);
}

/**
 * @brief Repeated careful seeding on one instance, reporting statistics of
 * the ratio (F(M_init) - f*) / (F* - f*) together with the theoretical
 * ceiling.  F* must be supplied (brute force or closed form).
 */
inline ratio_stats init_bound_experiment(const problem& prob, std::size_t k, std::size_t trials,
                                         const score_mode& mode, rng& gen, double F_star) {
    prob.validate();
    if (trials == 0) throw invalid_input("init_bound_experiment: needs trials >= 1");
    if (!prob.L || !prob.mu)
        throw invalid_input("init_bound_experiment: instance lacks smoothness metadata");
    const double f_star = mean_opt_value(prob);
    const double denom = F_star - f_star;
    if (!(denom > 1e-12 * std::max(1.0, std::abs(F_star))))
        throw degenerate_instance("init_bound_experiment: F* equals f*, ratio undefined");

    const std::uint64_t base = gen.next();
    Vec ratios(trials);
    for (std::size_t t = 0; t < trials; ++t) {
        rng trial_gen(derive_seed(base, seed_role::trial, t));
        const init_result seeded = careful_seed(prob, k, mode, trial_gen);
        ratios[t] = (evaluate_objective(seeded.params, prob) - f_star) / denom;
    }

    Vec sorted = ratios;
    std::sort(sorted.begin(), sorted.end());
    double mean = 0.0;
    for (double r : ratios) mean += r;
    mean /= static_cast<double>(trials);
    double var = 0.0;
    for (double r : ratios) var += (r - mean) * (r - mean);
    var /= std::max<std::size_t>(trials - 1, 1);

    ratio_stats out;
    out.mean = mean;
    out.stderr_mean = std::sqrt(var / static_cast<double>(trials));
    out.min = sorted.front();
    out.median = sorted[trials / 2];
    out.max = sorted.back();
    out.ceiling = init_ratio_ceiling(k, *prob.L, *prob.mu);
    out.trials = trials;
    return out;
}

}  // namespace som
