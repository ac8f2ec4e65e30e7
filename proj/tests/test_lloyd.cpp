#include <gtest/gtest.h>

#include <som/diagnostics.hpp>
#include <som/experiments.hpp>
#include <som/init.hpp>
#include <som/lloyd.hpp>
#include <som/models.hpp>

#include "support.hpp"

using namespace som;
using test_support::centers_1d;

TEST(AdamStep, ZeroGradientZeroStep) {
    adam_state state(3);
    const Vec step = adam_step(state, Vec(3, 0.0), adam_config{});
    EXPECT_DOUBLE_EQ(vec_norm(step), 0.0);
}

TEST(AdamStep, FirstStepClosedForm) {
    // m_hat = g, v_hat = g^2: step = -lr g / (|g| + eps)
    adam_state state(2);
    const adam_config cfg{};
    const Vec g = {3.0, -0.5};
    const Vec step = adam_step(state, g, cfg);
    for (std::size_t i = 0; i < g.size(); ++i)
        EXPECT_NEAR(step[i], -cfg.lr * g[i] / (std::abs(g[i]) + cfg.eps), 1e-18);
}

TEST(AdamStep, Deterministic) {
    adam_state s1(2), s2(2);
    const adam_config cfg{};
    rng gen(5);
    for (int t = 0; t < 50; ++t) {
        const Vec g = gen.normal_vec(2);
        EXPECT_EQ(adam_step(s1, g, cfg), adam_step(s2, g, cfg));
    }
    EXPECT_EQ(s1.m, s2.m);
    EXPECT_EQ(s1.v, s2.v);
}

TEST(LloydRun, ExactMinIsClassicLloyd) {
    // one round: every parameter becomes the centroid of its cluster
    const problem prob = make_quad_problem(centers_1d({0.0, 1.0, 9.0, 10.0}));
    lloyd_config cfg;
    cfg.mode = update_mode::exact_min;
    cfg.max_iters = 1;
    const lloyd_result res = lloyd_run(prob, {Vec{0.4}, Vec{9.6}}, cfg);
    EXPECT_DOUBLE_EQ(res.params[0][0], 0.5);
    EXPECT_DOUBLE_EQ(res.params[1][0], 9.5);
}

TEST(LloydRun, GradientModeConvergesToMean) {
    // k=1, gamma = 1/L on quadratics: linear convergence to the centroid
    const problem prob = make_quad_problem(centers_1d({1.0, 2.0, 6.0}));
    lloyd_config cfg;
    cfg.mode = update_mode::gradient;
    cfg.gamma = 1.0;  // L = 1
    cfg.max_iters = 60;
    const lloyd_result res = lloyd_run(prob, {Vec{-5.0}}, cfg);
    EXPECT_NEAR(res.params[0][0], 3.0, 1e-10);
    for (std::size_t t = 1; t < res.trace.rows.size(); ++t)
        EXPECT_LE(res.trace.rows[t].objective, res.trace.rows[t - 1].objective + 1e-15);
}

TEST(LloydRun, ExactMinMonotoneNonincreasing) {
    rng gen(61);
    for (int rep = 0; rep < 10; ++rep) {
        std::vector<Vec> centers;
        for (int i = 0; i < 12; ++i) centers.push_back(gen.normal_vec(2));
        const problem prob = make_quad_problem(centers);
        lloyd_config cfg;
        cfg.mode = update_mode::exact_min;
        cfg.max_iters = 30;
        const lloyd_result res =
            lloyd_run(prob, {gen.normal_vec(2), gen.normal_vec(2), gen.normal_vec(2)}, cfg);
        for (std::size_t t = 1; t < res.trace.rows.size(); ++t)
            EXPECT_LE(res.trace.rows[t].objective, res.trace.rows[t - 1].objective + 1e-15);
    }
}

TEST(LloydRun, ReachesBruteForceOptimumOnSeparatedInstance) {
    const problem prob = make_quad_problem(centers_1d({0.0, 0.2, 0.4, 10.0, 10.2, 10.4}));
    const brute_force_result bf = brute_force_optimum(prob, 2);

    rng gen(7);
    const init_result seeded = careful_seed(prob, 2, score_mode::exact_gap(), gen);
    lloyd_config cfg;
    cfg.mode = update_mode::exact_min;
    cfg.max_iters = 50;
    cfg.stop_on_stable = true;
    const lloyd_result res = lloyd_run(prob, seeded.params, cfg);
    EXPECT_NEAR(evaluate_objective(res.params, prob), bf.objective, 1e-9);
}

TEST(LloydRun, EmptyClusterParameterBitwiseUnchanged) {
    const problem prob = make_quad_problem(centers_1d({0.0, 1.0}));
    const Vec far = {123.456789};
    lloyd_config cfg;
    cfg.mode = update_mode::exact_min;
    cfg.max_iters = 10;
    const lloyd_result res = lloyd_run(prob, {Vec{0.5}, far, Vec{200.0}}, cfg);
    EXPECT_EQ(res.params[1], far);  // never the closest, never updated
}

TEST(LloydRun, StopOnStablePartitionTerminatesEarly) {
    const problem prob = make_quad_problem(centers_1d({0.0, 1.0, 9.0, 10.0}));
    lloyd_config cfg;
    cfg.mode = update_mode::exact_min;
    cfg.max_iters = 100;
    cfg.stop_on_stable = true;
    const lloyd_result res = lloyd_run(prob, {Vec{0.4}, Vec{9.6}}, cfg);
    EXPECT_LT(res.iters_run, 5u);
    EXPECT_DOUBLE_EQ(res.params[0][0], 0.5);
    EXPECT_DOUBLE_EQ(res.params[1][0], 9.5);
}

TEST(LloydRun, GradientRateBoundHolds) {
    // Average weighted gradient norm <= 2L (F(x0) - f*) / T at gamma = 1/L
    rng gen(67);
    for (int rep = 0; rep < 5; ++rep) {
        std::vector<Vec> as;
        Vec bs;
        for (int i = 0; i < 50; ++i) {
            as.push_back(gen.normal_vec(4));
            bs.push_back(gen.normal());
        }
        const problem prob = make_ridge_problem(as, bs, 0.1);
        rng init_gen(rep);
        const auto init = careful_seed(prob, 3, score_mode::exact_gap(), init_gen);
        const bound_check check = check_gd_rate(prob, init.params, 100);
        EXPECT_TRUE(check.pass) << "measured " << check.measured << " vs " << check.bound;
    }
}

TEST(LloydRun, AdamModeDecreasesMlpObjective) {
    rng gen(71);
    const mlp_dims dims{3, 2};
    std::vector<Vec> inputs;
    Vec targets;
    for (int i = 0; i < 40; ++i) {
        inputs.push_back(gen.normal_vec(3));
        targets.push_back(gen.normal());
    }
    const problem prob = make_mnr_problem(inputs, targets, 0.01, dims, 11);
    std::vector<Vec> params = {gen.normal_vec(dims.theta_size()),
                               gen.normal_vec(dims.theta_size())};
    lloyd_config cfg;
    cfg.mode = update_mode::adam;
    cfg.reclass_period = 10;
    cfg.max_iters = 300;
    const double before = evaluate_objective(params, prob);
    const lloyd_result res = lloyd_run(prob, params, cfg);
    EXPECT_LT(evaluate_objective(res.params, prob), before);
}

TEST(LloydRun, RejectsBadConfigurations) {
    const problem quad = make_quad_problem(centers_1d({0.0}));
    lloyd_config cfg;
    cfg.mode = update_mode::gradient;
    cfg.gamma = 0.0;
    EXPECT_THROW(lloyd_run(quad, {Vec{0.0}}, cfg), invalid_config);

    const problem frames = make_gpca_problem({Vec{1.0, 0.0, 0.0}}, 1);
    lloyd_config grad_cfg;
    grad_cfg.mode = update_mode::gradient;
    const Vec frame_param = *frames.oracles[0]->minimizer();
    EXPECT_THROW(lloyd_run(frames, {frame_param}, grad_cfg), invalid_config);

    problem no_min = make_quad_problem(centers_1d({0.0}));
    no_min.group_minimizer = nullptr;
    lloyd_config exact_cfg;
    exact_cfg.mode = update_mode::exact_min;
    EXPECT_THROW(lloyd_run(no_min, {Vec{0.0}}, exact_cfg), invalid_config);
}

TEST(LloydRun, TraceRecordsPartitionSizesAndIters) {
    const problem prob = make_quad_problem(centers_1d({0.0, 1.0, 2.0, 3.0}));
    lloyd_config cfg;
    cfg.mode = update_mode::exact_min;
    cfg.max_iters = 4;
    const lloyd_result res = lloyd_run(prob, {Vec{0.1}, Vec{2.9}}, cfg);
    ASSERT_EQ(res.trace.rows.size(), 4u);
    for (std::size_t t = 0; t < res.trace.rows.size(); ++t) {
        EXPECT_EQ(res.trace.rows[t].iter, t);
        std::size_t total = 0;
        for (std::size_t s : res.trace.rows[t].cluster_sizes) total += s;
        EXPECT_EQ(total, prob.size());
    }
}
