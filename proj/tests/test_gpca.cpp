#include <gtest/gtest.h>

#include <som/datagen.hpp>
#include <som/gpca.hpp>
#include <som/metrics.hpp>

using namespace som;

namespace {

mat axis_frame(std::size_t d, std::initializer_list<std::size_t> axes) {
    mat f(d, axes.size());
    std::size_t c = 0;
    for (std::size_t a : axes) f(a, c++) = 1.0;
    return f;
}

std::vector<mat> frames_from_params(const std::vector<Vec>& params, std::size_t d,
                                    std::size_t r) {
    std::vector<mat> out;
    for (const Vec& p : params) out.push_back(unflatten_frame(p, d, r));
    return out;
}

}  // namespace

TEST(GpcaObjectives, AxisCases) {
    const std::vector<Vec> pts = {Vec{1.0, 0.0}};
    EXPECT_DOUBLE_EQ(gpca_som_objective({axis_frame(2, {1})}, pts), 0.0);
    EXPECT_DOUBLE_EQ(gpca_som_objective({axis_frame(2, {0})}, pts), 0.5);
}

TEST(GpcaObjectives, SopSingleFrameIsTwiceSom) {
    rng gen(3);
    std::vector<Vec> pts;
    for (int i = 0; i < 10; ++i) pts.push_back(gen.normal_vec(3));
    const std::vector<mat> frames = {householder_complement(gen.normal_vec(3), 1)};
    EXPECT_NEAR(gpca_sop_objective(frames, pts), 2.0 * gpca_som_objective(frames, pts), 1e-12);
}

TEST(GpcaObjectives, SopHandProduct) {
    // y = (1,1)/sqrt(2), A1 = e1, A2 = e2: term = (1/2)(1/2) = 0.25
    const double s = 1.0 / std::sqrt(2.0);
    const std::vector<Vec> pts = {Vec{s, s}};
    EXPECT_NEAR(gpca_sop_objective({axis_frame(2, {0}), axis_frame(2, {1})}, pts), 0.25, 1e-15);
}

TEST(GpcaObjectives, OrthogonalPointKillsItsTerm) {
    const std::vector<Vec> pts = {Vec{1.0, 0.0, 0.0}};
    const std::vector<mat> frames = {axis_frame(3, {1}), axis_frame(3, {0})};
    // product contains |y^T e2|^2 = 0
    EXPECT_DOUBLE_EQ(gpca_sop_objective(frames, pts), 0.0);
}

TEST(GpcaObjectives, MatchesCoreObjective) {
    rng gen(7);
    std::vector<Vec> pts;
    for (int i = 0; i < 25; ++i) pts.push_back(gen.normal_vec(4));
    const problem prob = make_gpca_problem(pts, 2);
    std::vector<mat> frames;
    std::vector<Vec> params;
    for (int j = 0; j < 3; ++j) {
        const mat f = householder_complement(gen.normal_vec(4), 2);
        frames.push_back(f);
        params.push_back(flatten_frame(f));
    }
    EXPECT_NEAR(gpca_som_objective(frames, pts), evaluate_objective(params, prob), 1e-12);
}

TEST(GpcaObjectives, RejectsNonOrthonormalFrame) {
    mat bad(3, 1);
    bad(0, 0) = 0.5;
    EXPECT_THROW(gpca_som_objective({bad}, {Vec{1.0, 0.0, 0.0}}), invalid_input);
    EXPECT_THROW(gpca_sop_objective({bad}, {Vec{1.0, 0.0, 0.0}}), invalid_input);
}

TEST(GpcaLloyd, GroundTruthInitIsFixedPoint) {
    const labeled_dataset ds = gen_gpca(2, 4, 2, 200, 11);
    std::vector<mat> truth = frames_from_params(ds.true_params, 4, 2);
    const gpca_result res = gpca_lloyd(ds.inputs, truth, 50);
    EXPECT_LE(res.iters_run, 2u);
    EXPECT_NEAR(res.trace.rows.back().objective, 0.0, 1e-18);
    EXPECT_DOUBLE_EQ(cluster_accuracy(res.part.assignment, ds.labels, 2), 1.0);
}

TEST(GpcaLloyd, SingleClusterMatchesPca) {
    rng gen(13);
    std::vector<Vec> pts;
    for (int i = 0; i < 50; ++i) pts.push_back(gen.normal_vec(4));
    std::vector<std::size_t> all(pts.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const mat direct = gpca_group_minimizer(all, pts, 2);

    const gpca_result res = gpca_lloyd(pts, {householder_complement(gen.normal_vec(4), 2)}, 10);
    EXPECT_NEAR(gpca_som_objective(res.frames, pts), gpca_som_objective({direct}, pts), 1e-12);
}

TEST(GpcaLloyd, ObjectiveNonincreasingFramesOrthonormal) {
    const labeled_dataset ds = gen_gpca(3, 5, 3, 300, 17);
    rng gen(19);
    std::vector<mat> init;
    for (int j = 0; j < 3; ++j) init.push_back(householder_complement(gen.normal_vec(5), 3));
    const gpca_result res = gpca_lloyd(ds.inputs, init, 50);
    for (std::size_t t = 1; t < res.trace.rows.size(); ++t)
        EXPECT_LE(res.trace.rows[t].objective, res.trace.rows[t - 1].objective + 1e-15);
    for (const mat& f : res.frames) EXPECT_LE(orthonormality_defect(f), 1e-10);
}

TEST(GpcaBcd, SingleFrameIsPlainPca) {
    rng gen(23);
    std::vector<Vec> pts;
    for (int i = 0; i < 40; ++i) pts.push_back(gen.normal_vec(4));
    std::vector<std::size_t> all(pts.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const mat direct = gpca_group_minimizer(all, pts, 2);
    const std::vector<mat> res =
        gpca_bcd(pts, {householder_complement(gen.normal_vec(4), 2)}, 1);
    EXPECT_NEAR(gpca_som_objective(res, pts), gpca_som_objective({direct}, pts), 1e-12);
}

TEST(GpcaBcd, OneSweepUsesHalfUpdatedWeights) {
    // three points in d=2, r=1, k=2: after updating A_1 this sweep, the
    // weights for block 2 must use the new A_1
    rng gen(29);
    const std::vector<Vec> pts = {Vec{1.0, 0.3}, Vec{-0.4, 1.0}, Vec{0.8, 0.8}};
    std::vector<mat> init = {householder_complement(gen.normal_vec(2), 1),
                             householder_complement(gen.normal_vec(2), 1)};
    const std::vector<mat> after = gpca_bcd(pts, init, 1);

    // replicate the sweep by hand
    auto resid = [&](const Vec& y, const mat& f) {
        double p = y[0] * f(0, 0) + y[1] * f(1, 0);
        return p * p;
    };
    std::vector<mat> hand = init;
    for (std::size_t j = 0; j < 2; ++j) {
        mat M(2, 2);
        for (const Vec& y : pts) {
            const double w = resid(y, hand[1 - j]);  // k=2: the other block
            for (std::size_t a = 0; a < 2; ++a)
                for (std::size_t b = 0; b < 2; ++b) M(a, b) += w * y[a] * y[b];
        }
        for (double& x : M.a) x /= 3.0;
        const auto eig = sym_eig(M);
        for (std::size_t i = 0; i < 2; ++i) hand[j](i, 0) = eig.vectors(i, 0);
    }
    for (std::size_t j = 0; j < 2; ++j)
        for (std::size_t i = 0; i < 2; ++i)
            EXPECT_NEAR(std::abs(after[j](i, 0)), std::abs(hand[j](i, 0)), 1e-12);
}

TEST(GpcaBcd, SopObjectiveNonincreasingOverSweeps) {
    const labeled_dataset ds = gen_gpca(2, 4, 2, 150, 31);
    rng gen(37);
    std::vector<mat> frames;
    for (int j = 0; j < 2; ++j) frames.push_back(householder_complement(gen.normal_vec(4), 2));
    double prev = gpca_sop_objective(frames, ds.inputs);
    for (int sweep = 0; sweep < 8; ++sweep) {
        frames = gpca_bcd(ds.inputs, frames, 1);
        const double now = gpca_sop_objective(frames, ds.inputs);
        EXPECT_LE(now, prev + 1e-12);
        prev = now;
    }
}

TEST(GpcaLloyd, RotationInvariantAccuracy) {
    const labeled_dataset ds = gen_gpca(2, 4, 2, 200, 41);
    rng gen(43);
    std::vector<mat> init;
    for (int j = 0; j < 2; ++j) init.push_back(householder_complement(gen.normal_vec(4), 2));
    const gpca_result base = gpca_lloyd(ds.inputs, init, 50);
    const double base_acc = cluster_accuracy(base.part.assignment, ds.labels, 2);

    const mat q = random_orthogonal(4, gen);
    auto rotate = [&](const Vec& v) { return mat_vec(q, v); };
    std::vector<Vec> rpts;
    for (const Vec& y : ds.inputs) rpts.push_back(rotate(y));
    std::vector<mat> rinit;
    for (const mat& f : init) {
        mat rf(4, 2);
        for (std::size_t c = 0; c < 2; ++c) {
            const Vec col = rotate(f.col(c));
            for (std::size_t i = 0; i < 4; ++i) rf(i, c) = col[i];
        }
        rinit.push_back(rf);
    }
    const gpca_result rot = gpca_lloyd(rpts, rinit, 50);
    EXPECT_DOUBLE_EQ(cluster_accuracy(rot.part.assignment, ds.labels, 2), base_acc);
}
