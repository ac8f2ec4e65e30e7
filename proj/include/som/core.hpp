#pragma once

// Problem abstraction for sum-of-minimum optimization:
//
//     min over (x_1, ..., x_k) of  (1/N) sum_i  min_j  f_i(x_j)
//
// Sub-functions are exposed behind the `sub_function` oracle interface.
// Parameters are flat vectors; orthonormal-frame parameters (subspace
// clustering) are stored row-major in the same flat representation and
// reject gradient-based operations.

#include <functional>
#include <memory>
#include <optional>

#include "common.hpp"

namespace som {

struct param_kind {
    enum class tag_t { vector, frame };
    tag_t tag = tag_t::vector;
    std::size_t dim = 0;   // ambient dimension d
    std::size_t rank = 0;  // frame columns r (0 for plain vectors)

    static param_kind vector(std::size_t d) { return {tag_t::vector, d, 0}; }
    static param_kind frame(std::size_t d, std::size_t r) { return {tag_t::frame, d, r}; }

    bool is_vector() const { return tag == tag_t::vector; }
    std::size_t flat_size() const { return is_vector() ? dim : dim * rank; }
};

/**
 * @brief Behavioral interface of one sub-function f_i.
 *
 * Implementations must be immutable after construction; value/gradient are
 * pure and safe to call concurrently.  `minimizer` and `opt_value` are
 * optional: families where argmin f_i or f_i^* is unavailable (or only
 * approximable) simply do not provide them.
 */
class sub_function {
  public:
    virtual ~sub_function() = default;

    virtual double value(const Vec& x) const = 0;

    /// Gradient with respect to x.  Frame-valued families throw
    /// unsupported_oracle: the solvers use exact eigen-updates there instead.
    virtual Vec gradient(const Vec& x) const = 0;

    virtual std::optional<Vec> minimizer() const { return std::nullopt; }
    virtual std::optional<double> opt_value() const { return std::nullopt; }
};

using sub_function_ptr = std::shared_ptr<const sub_function>;

/**
 * @brief A sum-of-minimum instance: N sub-function oracles over a common
 * parameter space, with optional smoothness metadata.
 *
 * `group_minimizer`, when set, returns argmin_x sum_{i in C} f_i(x) for a
 * nonempty index set C; solvers in exact-minimization mode require it.
 */
struct problem {
    std::vector<sub_function_ptr> oracles;
    param_kind kind;
    std::optional<double> L;    // smoothness constant
    std::optional<double> mu;   // strong-convexity constant
    std::function<Vec(const std::vector<std::size_t>&)> group_minimizer;

    std::size_t size() const { return oracles.size(); }

    void validate() const {
        if (oracles.empty()) throw invalid_input("problem: needs at least one sub-function");
        if (kind.flat_size() == 0) throw invalid_input("problem: empty parameter space");
        if (L && mu && !(*mu > 0.0 && *mu <= *L))
            throw invalid_input("problem: requires 0 < mu <= L");
    }
};

/// Assignment of each index i in [N] to exactly one cluster in [k];
/// clusters may be empty.
struct partition {
    std::vector<std::size_t> assignment;
    std::size_t k = 0;

    std::vector<std::size_t> sizes() const {
        std::vector<std::size_t> s(k, 0);
        for (std::size_t j : assignment) ++s[j];
        return s;
    }

    std::vector<std::vector<std::size_t>> clusters() const {
        std::vector<std::vector<std::size_t>> c(k);
        for (std::size_t i = 0; i < assignment.size(); ++i) c[assignment[i]].push_back(i);
        return c;
    }
};

/// One solver iteration record.  `weighted_grad_sq` is
/// sum_j (|C_j|/N) |grad F_j(x_j)|^2 (0 for eigen-update runs);
/// `seconds` is wall time since the run started and is excluded from any
/// reproducibility guarantee.
struct trace_row {
    std::size_t iter = 0;
    double objective = 0.0;
    double weighted_grad_sq = 0.0;
    std::vector<std::size_t> cluster_sizes;
    double seconds = 0.0;
};

struct run_trace {
    std::vector<trace_row> rows;
};

namespace detail {
inline void check_params(const std::vector<Vec>& params, const problem& prob) {
    prob.validate();
    if (params.empty()) throw invalid_input("parameter set: needs k >= 1 members");
    for (const Vec& p : params) {
        if (p.size() != prob.kind.flat_size())
            throw invalid_input("parameter set: dimension mismatch with problem");
        if (!all_finite(p)) throw invalid_input("parameter set: non-finite entry");
    }
}
}  // namespace detail

/// F(x_1, ..., x_k) = (1/N) sum_i min_j f_i(x_j).
inline double evaluate_objective(const std::vector<Vec>& params, const problem& prob) {
    detail::check_params(params, prob);
    double total = 0.0;
    for (const auto& oracle : prob.oracles) {
        double best = oracle->value(params[0]);
        for (std::size_t j = 1; j < params.size(); ++j)
            best = std::min(best, oracle->value(params[j]));
        total += best;
    }
    return total / static_cast<double>(prob.size());
}

/// Assigns every index to the lowest cluster id attaining min_j f_i(x_j).
inline partition reclassify(const std::vector<Vec>& params, const problem& prob) {
    detail::check_params(params, prob);
    partition part;
    part.k = params.size();
    part.assignment.resize(prob.size());
    for (std::size_t i = 0; i < prob.size(); ++i) {
        std::size_t best_j = 0;
        double best = prob.oracles[i]->value(params[0]);
        for (std::size_t j = 1; j < params.size(); ++j) {
            const double v = prob.oracles[i]->value(params[j]);
            if (v < best) {  // strict: ties stay at the smaller index
                best = v;
                best_j = j;
            }
        }
        part.assignment[i] = best_j;
    }
    return part;
}

/// Group objective F_j = (1/|C_j|) sum_{i in C_j} f_i(x_j) and its gradient;
/// (0, zero gradient) for an empty cluster.
inline std::pair<double, Vec> group_objective(const partition& part, std::size_t j,
                                              const std::vector<Vec>& params,
                                              const problem& prob) {
    if (j >= part.k) throw invalid_input("group_objective: cluster id out of range");
    double value = 0.0;
    Vec grad(prob.kind.flat_size(), 0.0);
    std::size_t count = 0;
    for (std::size_t i = 0; i < part.assignment.size(); ++i) {
        if (part.assignment[i] != j) continue;
        value += prob.oracles[i]->value(params[j]);
        vec_axpy(1.0, prob.oracles[i]->gradient(params[j]), grad);
        ++count;
    }
    if (count == 0) return {0.0, grad};
    const double inv = 1.0 / static_cast<double>(count);
    vec_scale(grad, inv);
    return {value * inv, grad};
}

/// F(params) - (1/N) sum_i f_i^*; requires every oracle to expose f_i^*.
inline double averaged_optimality_gap(const std::vector<Vec>& params, const problem& prob) {
    double fstar_sum = 0.0;
    for (const auto& oracle : prob.oracles) {
        const auto fs = oracle->opt_value();
        if (!fs) throw unsupported_oracle("averaged_optimality_gap: oracle lacks opt_value");
        fstar_sum += *fs;
    }
    return evaluate_objective(params, prob) - fstar_sum / static_cast<double>(prob.size());
}

/// Mean of the known optimal values, f^* = (1/N) sum_i f_i^*.
inline double mean_opt_value(const problem& prob) {
    double s = 0.0;
    for (const auto& oracle : prob.oracles) {
        const auto fs = oracle->opt_value();
        if (!fs) throw unsupported_oracle("mean_opt_value: oracle lacks opt_value");
        s += *fs;
    }
    return s / static_cast<double>(prob.size());
}

}  // namespace som
