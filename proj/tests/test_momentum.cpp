#include <gtest/gtest.h>

#include <som/experiments.hpp>
#include <som/init.hpp>
#include <som/momentum.hpp>

#include "support.hpp"

using namespace som;
using test_support::centers_1d;

TEST(GammaBar, VanishingBetaLimit) {
    // second term blows up as beta -> 0, leaving (1 - beta)/(2L)
    const double g = gamma_bar(1.5, 1e-9, 2.0);
    EXPECT_NEAR(g, 0.25, 1e-8);
}

TEST(GammaBar, HandEvaluatedPoint) {
    EXPECT_NEAR(gamma_bar(1.25, 0.5, 1.0), 0.19365, 1e-4);
}

TEST(GammaBar, InverseHomogeneityInL) {
    const double g1 = gamma_bar(1.3, 0.4, 1.7);
    const double g2 = gamma_bar(1.3, 0.4, 3.4);
    EXPECT_DOUBLE_EQ(g1 / 2.0, g2);
}

TEST(GammaBar, RejectsBadArguments) {
    EXPECT_THROW(gamma_bar(0.9, 0.5, 1.0), invalid_config);
    EXPECT_THROW(gamma_bar(1.5, 0.0, 1.0), invalid_config);
    EXPECT_THROW(gamma_bar(2.5, 0.5, 1.0), invalid_config);  // alpha beta >= 1
    EXPECT_THROW(gamma_bar(1.5, 0.5, 0.0), invalid_config);
}

TEST(MomentumRun, FirstIterateRepeatsInitialPoint) {
    // m^(0) = 0 forces x^(1) = x^(0) and u^(1) = x^(0)
    const problem prob = make_quad_problem(centers_1d({0.0, 4.0}));
    momentum_config cfg;
    cfg.gamma = 0.1;
    cfg.beta = 0.5;
    cfg.alpha = 1.5;
    cfg.max_iters = 1;
    rng gen(3);
    momentum_debug dbg;
    const std::vector<Vec> init = {Vec{1.0}, Vec{3.0}};
    momentum_run(prob, init, cfg, gen, &dbg);
    EXPECT_EQ(dbg.x[1], init);
    ASSERT_EQ(dbg.u.size(), 1u);
    EXPECT_EQ(dbg.u[0], init);
}

TEST(MomentumRun, AccelerationPointFormula) {
    // beta = 0.5, x^t = 0, x^{t+1} = 1  ->  u = (1 - 0.5 * 0) / 0.5 = 2
    const double beta = 0.5;
    const double x_prev = 0.0, x_next = 1.0;
    EXPECT_DOUBLE_EQ((x_next - beta * x_prev) / (1.0 - beta), 2.0);
}

TEST(MomentumRun, TrajectoryIdentities) {
    rng data_gen(7);
    std::vector<Vec> centers;
    for (int i = 0; i < 10; ++i) centers.push_back(data_gen.normal_vec(2));
    const problem prob = make_quad_problem(centers);
    momentum_config cfg;
    cfg.gamma = 0.2;
    cfg.beta = 0.5;
    cfg.alpha = 1.5;
    cfg.max_iters = 20;
    rng gen(9);
    momentum_debug dbg;
    momentum_run(prob, {data_gen.normal_vec(2), data_gen.normal_vec(2)}, cfg, gen, &dbg);

    for (std::size_t t = 0; t + 1 < dbg.x.size(); ++t) {
        for (std::size_t j = 0; j < dbg.x[t].size(); ++j) {
            for (std::size_t c = 0; c < dbg.x[t][j].size(); ++c) {
                // x^{t+1} = x^t - gamma m^t, bitwise by construction
                EXPECT_EQ(dbg.x[t + 1][j][c], dbg.x[t][j][c] + (-cfg.gamma) * dbg.m[t][j][c]);
                // u^{t+1} (1 - beta) + beta x^t = x^{t+1}   (r = 1: u exists each t)
                EXPECT_NEAR(dbg.u[t][j][c] * (1.0 - cfg.beta) + cfg.beta * dbg.x[t][j][c],
                            dbg.x[t + 1][j][c], 1e-12);
            }
        }
    }
}

TEST(MomentumRun, TinyBetaMatchesGradientLloydShiftedByOne) {
    rng data_gen(11);
    std::vector<Vec> centers;
    for (int i = 0; i < 8; ++i) centers.push_back(data_gen.normal_vec(2));
    const problem prob = make_quad_problem(centers);
    const std::vector<Vec> init = {data_gen.normal_vec(2), data_gen.normal_vec(2)};

    lloyd_config lcfg;
    lcfg.mode = update_mode::gradient;
    lcfg.gamma = 0.3;
    lcfg.max_iters = 15;
    const lloyd_result lref = lloyd_run(prob, init, lcfg);

    momentum_config mcfg;
    mcfg.gamma = 0.3;
    mcfg.beta = 1e-300;  // effective zero: m^{t+1} collapses to the new gradient
    mcfg.alpha = 1e12;   // unconstrained
    mcfg.max_iters = 16;
    rng gen(13);
    momentum_debug dbg;
    momentum_run(prob, init, mcfg, gen, &dbg);

    // momentum x^{t+1} tracks lloyd x^t
    lloyd_config probe = lcfg;
    for (std::size_t t = 1; t + 1 < dbg.x.size() && t <= 14; ++t) {
        probe.max_iters = t;
        const lloyd_result step = lloyd_run(prob, init, probe);
        for (std::size_t j = 0; j < init.size(); ++j)
            for (std::size_t c = 0; c < init[j].size(); ++c)
                EXPECT_NEAR(dbg.x[t + 1][j][c], step.params[j][c], 1e-13);
    }
}

TEST(ControlledReclassify, NoChangeWhenAlreadyOptimal) {
    const problem prob = make_quad_problem(centers_1d({0.0, 10.0}));
    const std::vector<Vec> u = {Vec{0.0}, Vec{10.0}};
    partition cur{{0, 1}, 2};
    rng gen(17);
    const partition next = controlled_reclassify(cur, u, prob, 1.5, gen);
    EXPECT_EQ(next.assignment, cur.assignment);
}

TEST(ControlledReclassify, LargeAlphaMatchesPlainReclassify) {
    // Note: even a huge alpha never lets a nonempty reference cluster drain
    // to zero (the lower band is positive), so the instance keeps both
    // target clusters nonempty.
    rng data_gen(19);
    for (int rep = 0; rep < 10; ++rep) {
        std::vector<Vec> centers;
        for (int i = 0; i < 6; ++i) {
            Vec c = data_gen.normal_vec(2);
            centers.push_back(c);
            vec_axpy(1.0, Vec{20.0, 0.0}, c);
            centers.push_back(c);
        }
        const problem prob = make_quad_problem(centers);
        Vec u1 = data_gen.normal_vec(2);
        Vec u2 = data_gen.normal_vec(2);
        u2[0] += 20.0;
        const std::vector<Vec> u = {u1, u2};
        const partition plain = reclassify(u, prob);
        partition cur;
        cur.k = 2;
        cur.assignment.assign(centers.size(), 0);
        for (std::size_t i = 1; i < centers.size(); i += 2) cur.assignment[i] = 1;
        rng gen(rep);
        const partition ctl =
            controlled_reclassify(cur, u, prob, static_cast<double>(centers.size() * 10), gen);
        EXPECT_EQ(ctl.assignment, plain.assignment);
    }
}

TEST(ControlledReclassify, StopsAtSizeBandViolation) {
    // clusters sized (4,4), alpha = 1.5: band is [8/3, 6], so the second
    // migration out of cluster 1 (size 4 -> 2) halts the sweep at (5, 3)
    std::vector<Vec> centers;
    for (int i = 0; i < 8; ++i) centers.push_back(Vec{static_cast<double>(i)});
    const problem prob = make_quad_problem(centers);
    partition cur;
    cur.k = 2;
    cur.assignment = {0, 0, 0, 0, 1, 1, 1, 1};
    // all points prefer cluster 0 by a wide margin
    const std::vector<Vec> u = {Vec{3.5}, Vec{1000.0}};
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        rng gen(seed);
        const partition next = controlled_reclassify(cur, u, prob, 1.5, gen);
        const auto sizes = next.sizes();
        EXPECT_EQ(sizes[0], 5u);
        EXPECT_EQ(sizes[1], 3u);
        // migrants must come from cluster 1
        for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(next.assignment[i], 0u);
    }
}

TEST(ControlledReclassify, EmptyReferenceClusterMayAcquire) {
    const problem prob = make_quad_problem(centers_1d({0.0, 0.1, 5.0}));
    partition cur;
    cur.k = 2;
    cur.assignment = {0, 0, 0};
    const std::vector<Vec> u = {Vec{0.0}, Vec{5.0}};
    rng gen(23);
    const partition next = controlled_reclassify(cur, u, prob, 1.5, gen);
    EXPECT_EQ(next.assignment[2], 1u);
}

TEST(MomentumRun, SizeControlHoldsAlongRun) {
    rng data_gen(29);
    std::vector<Vec> as;
    Vec bs;
    for (int i = 0; i < 60; ++i) {
        as.push_back(data_gen.normal_vec(3));
        bs.push_back(data_gen.normal());
    }
    const problem prob = make_ridge_problem(as, bs, 0.1);
    rng init_gen(31);
    const auto init = careful_seed(prob, 3, score_mode::exact_gap(), init_gen);

    const momentum_check_result check =
        check_momentum_rate(prob, init.params, 150, 0.5, 1.25, 37);
    EXPECT_TRUE(check.rate.pass) << check.rate.measured << " vs " << check.rate.bound;
    EXPECT_TRUE(check.size_control_ok);
}

TEST(MomentumRun, RejectsInvalidConfig) {
    const problem prob = make_quad_problem(centers_1d({0.0}));
    momentum_config cfg;
    cfg.beta = 0.9;
    cfg.alpha = 1.2;  // alpha * beta > 1
    rng gen(1);
    EXPECT_THROW(momentum_run(prob, {Vec{0.0}}, cfg, gen), invalid_config);
}
