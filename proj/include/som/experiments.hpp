#pragma once

// Experiment drivers behind the CLI and the acceptance suite: the GPCA
// model comparison, the mixed linear/nonlinear regression seeding studies,
// and the empirical checks of the initialization and convergence bounds.
// Trials are independent, keyed by index, and parallelize over a small
// worker pool; aggregation order never depends on completion order.

#include <atomic>
#include <mutex>
#include <thread>

#include "datagen.hpp"
#include "diagnostics.hpp"
#include "gpca.hpp"
#include "init.hpp"
#include "lloyd.hpp"
#include "metrics.hpp"
#include "momentum.hpp"

namespace som {

template <typename Fn>
void parallel_for_index(std::size_t count, std::size_t jobs, Fn&& fn) {
    jobs = std::max<std::size_t>(1, std::min(jobs, count));
    if (jobs <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (std::size_t w = 0; w < jobs; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

enum class init_method { random, uniform, careful };

inline const char* init_method_name(init_method m) {
    switch (m) {
        case init_method::random: return "random";
        case init_method::uniform: return "uniform";
        case init_method::careful: return "proposed";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// GPCA: sum-of-minimum Lloyd vs. sum-of-product BCD on one (k, d) cell.

struct gpca_cell_config {
    std::size_t k = 2, d = 4, r = 2, n = 1000;
    std::size_t iters = 50;
    std::size_t trials = 100;
    std::uint64_t seed = 1;
    std::size_t jobs = 1;
};

struct gpca_trial_row {
    std::size_t trial = 0;
    double som_accuracy = 0.0;
    double sop_accuracy = 0.0;
    std::size_t som_iters = 0;
    double som_seconds = 0.0;  // hardware-dependent
    double sop_seconds = 0.0;
};

inline gpca_trial_row run_gpca_trial(const gpca_cell_config& cfg, std::size_t trial) {
    const std::uint64_t ts = derive_seed(cfg.seed, seed_role::trial, trial);
    const labeled_dataset ds = gen_gpca(cfg.k, cfg.d, cfg.r, cfg.n, ts);
    const problem prob = make_gpca_problem(ds.inputs, cfg.r);

    rng init_gen(derive_seed(ts, seed_role::init));
    const init_result seeded = careful_seed(prob, cfg.k, score_mode::exact_gap(), init_gen);
    std::vector<mat> frames;
    for (const Vec& p : seeded.params) frames.push_back(unflatten_frame(p, cfg.d, cfg.r));

    gpca_trial_row row;
    row.trial = trial;

    auto t0 = std::chrono::steady_clock::now();
    const gpca_result som_res = gpca_lloyd(ds.inputs, frames, cfg.iters);
    row.som_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    row.som_iters = som_res.iters_run;
    row.som_accuracy = cluster_accuracy(som_res.part.assignment, ds.labels, cfg.k);

    t0 = std::chrono::steady_clock::now();
    const std::vector<mat> bcd_frames = gpca_bcd(ds.inputs, frames, cfg.iters);
    row.sop_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    row.sop_accuracy = cluster_accuracy(gpca_labels(bcd_frames, ds.inputs), ds.labels, cfg.k);
    return row;
}

inline std::vector<gpca_trial_row> run_gpca_cell(const gpca_cell_config& cfg) {
    std::vector<gpca_trial_row> rows(cfg.trials);
    parallel_for_index(cfg.trials, cfg.jobs,
                       [&](std::size_t t) { rows[t] = run_gpca_trial(cfg, t); });
    return rows;
}

// ---------------------------------------------------------------------------
// Mixed linear regression: failure rate and iteration count of exact-update
// Lloyd under the three seeding methods, paired per trial.

struct mlr_cell_config {
    std::size_t k = 4, d = 4, n = 1000;
    double lambda = 0.01, sigma = 0.01;
    std::size_t max_iters = 200;
    std::size_t trials = 1000;
    std::uint64_t seed = 1;
    std::size_t jobs = 1;
};

struct mlr_trial_row {
    std::size_t trial = 0;
    init_method method = init_method::random;
    bool success = false;
    std::size_t iters = 0;
};

inline std::vector<Vec> make_initial_params(const problem& prob, std::size_t k,
                                            init_method method, const score_mode& careful_mode,
                                            rng& gen) {
    switch (method) {
        case init_method::random: return init_random(prob, k, gen);
        case init_method::uniform: return init_uniform_seeding(prob, k, gen).params;
        case init_method::careful: return careful_seed(prob, k, careful_mode, gen).params;
    }
    throw invalid_config("unknown init method");
}

inline std::vector<mlr_trial_row> run_mlr_trial(const mlr_cell_config& cfg, std::size_t trial) {
    const std::uint64_t ts = derive_seed(cfg.seed, seed_role::trial, trial);
    const labeled_dataset ds = gen_mlr(cfg.k, cfg.d, cfg.n, cfg.sigma, ts);
    const problem prob = make_ridge_problem(ds.inputs, ds.targets, cfg.lambda);
    const double f_truth = evaluate_objective(ds.true_params, prob);

    lloyd_config run_cfg;
    run_cfg.mode = update_mode::exact_min;
    run_cfg.reclass_period = 1;
    run_cfg.max_iters = cfg.max_iters;
    run_cfg.stop_on_stable = true;

    std::vector<mlr_trial_row> rows;
    for (init_method method :
         {init_method::random, init_method::uniform, init_method::careful}) {
        rng gen(derive_seed(ts, seed_role::init, static_cast<std::uint64_t>(method)));
        const auto params = make_initial_params(prob, cfg.k, method, score_mode::exact_gap(), gen);
        const lloyd_result res = lloyd_run(prob, params, run_cfg);
        const double f_final = evaluate_objective(res.params, prob);
        rows.push_back({trial, method, mlr_success(f_final, f_truth), res.iters_run});
    }
    return rows;
}

inline std::vector<mlr_trial_row> run_mlr_cell(const mlr_cell_config& cfg) {
    std::vector<std::vector<mlr_trial_row>> per_trial(cfg.trials);
    parallel_for_index(cfg.trials, cfg.jobs,
                       [&](std::size_t t) { per_trial[t] = run_mlr_trial(cfg, t); });
    std::vector<mlr_trial_row> rows;
    rows.reserve(cfg.trials * 3);
    for (auto& r : per_trial) rows.insert(rows.end(), r.begin(), r.end());
    return rows;
}

// ---------------------------------------------------------------------------
// Mixed nonlinear regression: ADAM-driven Lloyd training of k two-layer
// networks.  Mode A (fixed_epochs == 0) measures epochs until the objective
// reaches the ground-truth level; mode B trains a fixed number of epochs
// and reports train/test sum-of-minimum losses.

struct mnr_cell_config {
    std::size_t k = 5, d_in = 7, d_hidden = 5;
    std::size_t n = 1000, n_test = 200;
    double lambda = 0.01, sigma = 0.01;
    std::size_t reclass_period = 10;
    double lr = 1e-3;
    std::size_t max_epochs = 3000;
    std::size_t fixed_epochs = 0;  // mode B when > 0
    std::size_t trials = 20;
    std::uint64_t seed = 1;
    std::size_t jobs = 1;
};

struct mnr_trial_row {
    std::size_t trial = 0;
    init_method method = init_method::random;
    std::size_t epochs = 0;
    bool reached_target = false;
    double train_loss = 0.0;
    double test_loss = 0.0;
};

inline std::vector<mnr_trial_row> run_mnr_trial(const mnr_cell_config& cfg, std::size_t trial) {
    const std::uint64_t ts = derive_seed(cfg.seed, seed_role::trial, trial);
    const mnr_data data = gen_mnr(cfg.k, cfg.d_in, cfg.d_hidden, cfg.n, cfg.n_test, cfg.sigma, ts);
    const mlp_dims dims{cfg.d_in, cfg.d_hidden};
    const problem prob =
        make_mnr_problem(data.train.inputs, data.train.targets, cfg.lambda, dims, ts);
    const double f_truth = evaluate_objective(data.train.true_params, prob);

    lloyd_config run_cfg;
    run_cfg.mode = update_mode::adam;
    run_cfg.adam.lr = cfg.lr;
    run_cfg.reclass_period = cfg.reclass_period;
    const bool fixed = cfg.fixed_epochs > 0;
    run_cfg.max_iters = fixed ? cfg.fixed_epochs : cfg.max_epochs;
    if (!fixed) run_cfg.target_objective = f_truth;

    std::vector<mnr_trial_row> rows;
    for (init_method method :
         {init_method::random, init_method::uniform, init_method::careful}) {
        rng gen(derive_seed(ts, seed_role::init, static_cast<std::uint64_t>(method)));
        const auto params = make_initial_params(prob, cfg.k, method, score_mode::grad_norm(), gen);
        const lloyd_result res = lloyd_run(prob, params, run_cfg);

        mnr_trial_row row;
        row.trial = trial;
        row.method = method;
        if (fixed) {
            row.epochs = res.iters_run;
            row.train_loss = min_loss(data.train, res.params);
            row.test_loss = min_loss(data.test, res.params);
        } else {
            const trace_row& last = res.trace.rows.back();
            row.reached_target = last.objective <= f_truth;
            row.epochs = row.reached_target ? last.iter : cfg.max_epochs;
        }
        rows.push_back(row);
    }
    return rows;
}

inline std::vector<mnr_trial_row> run_mnr_cell(const mnr_cell_config& cfg) {
    std::vector<std::vector<mnr_trial_row>> per_trial(cfg.trials);
    parallel_for_index(cfg.trials, cfg.jobs,
                       [&](std::size_t t) { per_trial[t] = run_mnr_trial(cfg, t); });
    std::vector<mnr_trial_row> rows;
    rows.reserve(cfg.trials * 3);
    for (auto& r : per_trial) rows.insert(rows.end(), r.begin(), r.end());
    return rows;
}

// ---------------------------------------------------------------------------
// Bound checks.

struct bound_check {
    std::string name;
    double measured = 0.0;
    double bound = 0.0;
    bool pass = false;
};

/// Gradient-descent convergence: mean weighted gradient norm over a
/// gamma = 1/L run vs. 2L (F(x0) - f*) / T, with f* <= F* (conservative).
inline bound_check check_gd_rate(const problem& prob, const std::vector<Vec>& init,
                                 std::size_t iters) {
    if (!prob.L) throw invalid_input("check_gd_rate: instance lacks L");
    lloyd_config cfg;
    cfg.mode = update_mode::gradient;
    cfg.gamma = 1.0 / *prob.L;
    cfg.reclass_period = 1;
    cfg.max_iters = iters;
    const lloyd_result res = lloyd_run(prob, init, cfg);

    double mean = 0.0;
    for (const trace_row& row : res.trace.rows) mean += row.weighted_grad_sq;
    mean /= static_cast<double>(res.trace.rows.size());
    const double f0 = res.trace.rows.front().objective;
    const double bound = 2.0 * *prob.L * (f0 - mean_opt_value(prob)) /
                         static_cast<double>(res.trace.rows.size());
    return {"lloyd_gd_rate", mean, bound, mean <= bound};
}

struct momentum_check_result {
    bound_check rate;
    bool size_control_ok = true;
};

/// Momentum convergence at gamma = gamma_bar / 2 plus the per-refresh size
/// control band (empty reference clusters exempt from the upper bound).
inline momentum_check_result check_momentum_rate(const problem& prob,
                                                 const std::vector<Vec>& init,
                                                 std::size_t iters, double beta, double alpha,
                                                 std::uint64_t seed) {
    if (!prob.L) throw invalid_input("check_momentum_rate: instance lacks L");
    momentum_config cfg;
    cfg.beta = beta;
    cfg.alpha = alpha;
    cfg.gamma = gamma_bar(alpha, beta, *prob.L) / 2.0;
    cfg.reclass_period = 1;
    cfg.max_iters = iters;
    rng gen(seed);
    const momentum_result res = momentum_run(prob, init, cfg, gen);

    const std::size_t T = iters;
    double mean = 0.0;
    for (std::size_t t = 1; t <= T; ++t) mean += res.trace.rows[t].weighted_grad_sq;
    mean /= static_cast<double>(T);
    const double f0 = res.trace.rows.front().objective;
    const double bound = (2.0 * (1.0 - beta) / cfg.gamma) * (f0 - mean_opt_value(prob)) /
                         static_cast<double>(T);

    momentum_check_result out;
    out.rate = {"momentum_rate", mean, bound, mean <= bound};
    for (std::size_t t = 1; t < res.trace.rows.size(); ++t) {
        const auto& prev = res.trace.rows[t - 1].cluster_sizes;
        const auto& now = res.trace.rows[t].cluster_sizes;
        for (std::size_t j = 0; j < prev.size(); ++j) {
            const double ref = static_cast<double>(prev[j]);
            const double cur = static_cast<double>(now[j]);
            if (cur * alpha < ref) out.size_control_ok = false;
            if (ref > 0.0 && cur > alpha * ref) out.size_control_ok = false;
        }
    }
    return out;
}

/// Max deviation between the recorded careful-seeding weights and the
/// k-means++ distribution min_j |x_j - y_i|^2 (normalized), on quadratics.
inline double kmeanspp_weight_deviation(const std::vector<Vec>& points, std::size_t k,
                                        std::uint64_t seed) {
    const problem prob = make_quad_problem(points);
    rng gen(seed);
    const init_result res = careful_seed(prob, k, score_mode::exact_gap(), gen);

    double worst = 0.0;
    for (std::size_t round = 0; round < res.weight_history.size(); ++round) {
        Vec ref(points.size());
        double total = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            double best = vec_dist_sq(res.params[0], points[i]);
            for (std::size_t j = 1; j <= round; ++j)
                best = std::min(best, vec_dist_sq(res.params[j], points[i]));
            ref[i] = best;
            total += best;
        }
        for (std::size_t i = 0; i < points.size(); ++i)
            worst = std::max(worst, std::abs(ref[i] / total - res.weight_history[round][i]));
    }
    return worst;
}

}  // namespace som
