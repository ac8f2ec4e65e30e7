#pragma once

// Generalized principal component analysis, two ways:
//   * sum-of-minimum Lloyd iteration with exact eigen-updates per cluster
//   * block coordinate descent on the smooth sum-of-product relaxation
// Frames are d x r with orthonormal columns; each data point is scored by
// its squared projection onto a frame.

#include <chrono>

#include "core.hpp"
#include "lloyd.hpp"
#include "models.hpp"

namespace som {

namespace detail {
inline void check_frames(const std::vector<mat>& frames, std::size_t d) {
    if (frames.empty()) throw invalid_input("gpca: needs at least one frame");
    for (const mat& f : frames) {
        if (f.rows != d || f.cols == 0 || f.cols >= d)
            throw invalid_input("gpca: frame shape mismatch");
        if (orthonormality_defect(f) > 1e-10)
            throw invalid_input("gpca: frame columns are not orthonormal");
    }
}

inline double frame_residual_sq(const Vec& y, const mat& frame) {
    double s = 0.0;
    for (std::size_t c = 0; c < frame.cols; ++c) {
        double proj = 0.0;
        for (std::size_t i = 0; i < frame.rows; ++i) proj += y[i] * frame(i, c);
        s += proj * proj;
    }
    return s;
}
}  // namespace detail

/// (1/N) sum_i min_j (1/2) |y_i^T A_j|^2.
inline double gpca_som_objective(const std::vector<mat>& frames, const std::vector<Vec>& points) {
    if (points.empty()) throw invalid_input("gpca: no data");
    detail::check_frames(frames, points[0].size());
    double total = 0.0;
    for (const Vec& y : points) {
        double best = detail::frame_residual_sq(y, frames[0]);
        for (std::size_t j = 1; j < frames.size(); ++j)
            best = std::min(best, detail::frame_residual_sq(y, frames[j]));
        total += 0.5 * best;
    }
    return total / static_cast<double>(points.size());
}

/// (1/N) sum_i prod_j |y_i^T A_j|^2, the smooth relaxation.
inline double gpca_sop_objective(const std::vector<mat>& frames, const std::vector<Vec>& points) {
    if (points.empty()) throw invalid_input("gpca: no data");
    detail::check_frames(frames, points[0].size());
    double total = 0.0;
    for (const Vec& y : points) {
        double prod = 1.0;
        for (const mat& f : frames) prod *= detail::frame_residual_sq(y, f);
        total += prod;
    }
    return total / static_cast<double>(points.size());
}

struct gpca_result {
    std::vector<mat> frames;
    partition part;
    run_trace trace;
    std::size_t iters_run = 0;
};

/**
 * @brief Sum-of-minimum GPCA: alternate reclassification with per-cluster
 * eigen-updates (bottom-r eigenvectors of the cluster covariance), stopping
 * on an exact objective repeat or after max_iters iterations.
 */
inline gpca_result gpca_lloyd(const std::vector<Vec>& points, std::vector<mat> frames,
                              std::size_t max_iters) {
    if (points.empty()) throw invalid_input("gpca_lloyd: no data");
    const std::size_t d = points[0].size();
    detail::check_frames(frames, d);
    const std::size_t r = frames[0].cols;
    const auto start = std::chrono::steady_clock::now();

    const problem prob = make_gpca_problem(points, r);
    std::vector<Vec> params;
    for (const mat& f : frames) params.push_back(flatten_frame(f));

    gpca_result out;
    double prev_objective = std::numeric_limits<double>::infinity();
    partition part;
    bool have_part = false;

    for (std::size_t t = 0; t < max_iters; ++t) {
        const double objective = gpca_som_objective(frames, points);
        part = reclassify(params, prob);
        have_part = true;
        out.trace.rows.push_back({t, objective, 0.0, part.sizes(), detail::elapsed_s(start)});
        if (objective == prev_objective) break;  // exact repeat, per the update rule
        prev_objective = objective;

        const auto clusters = part.clusters();
        for (std::size_t j = 0; j < frames.size(); ++j) {
            if (clusters[j].empty()) continue;  // empty cluster keeps its frame
            frames[j] = gpca_group_minimizer(clusters[j], points, r);
            params[j] = flatten_frame(frames[j]);
        }
        out.iters_run = t + 1;
    }
    if (!have_part) part = reclassify(params, prob);

    out.frames = std::move(frames);
    out.part = part;
    return out;
}

/**
 * @brief Block coordinate descent on the sum-of-product objective.
 *
 * Per sweep, block j is refreshed using the half-updated weights
 * w_ij = prod_{l<j} |y_i^T A_l^{new}|^2 * prod_{l>j} |y_i^T A_l^{old}|^2
 * and replaced by the bottom-r eigenvectors of the weighted covariance.
 */
inline std::vector<mat> gpca_bcd(const std::vector<Vec>& points, std::vector<mat> frames,
                                 std::size_t sweeps) {
    if (points.empty()) throw invalid_input("gpca_bcd: no data");
    const std::size_t d = points[0].size();
    detail::check_frames(frames, d);
    const std::size_t r = frames[0].cols;
    const std::size_t n = points.size();
    const std::size_t k = frames.size();

    for (std::size_t sweep = 0; sweep < sweeps; ++sweep) {
        for (std::size_t j = 0; j < k; ++j) {
            mat M(d, d);
            for (std::size_t i = 0; i < n; ++i) {
                double w = 1.0;
                for (std::size_t l = 0; l < k; ++l) {
                    if (l == j) continue;
                    w *= detail::frame_residual_sq(points[i], frames[l]);
                }
                if (w == 0.0) continue;
                const Vec& y = points[i];
                for (std::size_t a = 0; a < d; ++a)
                    for (std::size_t b = 0; b < d; ++b) M(a, b) += w * y[a] * y[b];
            }
            for (double& x : M.a) x /= static_cast<double>(n);
            const sym_eig_result eig = sym_eig(M);
            for (std::size_t c = 0; c < r; ++c)
                for (std::size_t i = 0; i < d; ++i) frames[j](i, c) = eig.vectors(i, c);
        }
    }
    return frames;
}

/// Cluster labels induced by a frame set: nearest subspace per point.
inline std::vector<std::size_t> gpca_labels(const std::vector<mat>& frames,
                                            const std::vector<Vec>& points) {
    detail::check_frames(frames, points.empty() ? 0 : points[0].size());
    std::vector<std::size_t> labels(points.size(), 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        double best = detail::frame_residual_sq(points[i], frames[0]);
        for (std::size_t j = 1; j < frames.size(); ++j) {
            const double v = detail::frame_residual_sq(points[i], frames[j]);
            if (v < best) {
                best = v;
                labels[i] = j;
            }
        }
    }
    return labels;
}

}  // namespace som
