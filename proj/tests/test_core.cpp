#include <gtest/gtest.h>

#include <som/core.hpp>
#include <som/models.hpp>
#include <som/rng.hpp>

#include "support.hpp"

using namespace som;
using test_support::centers_1d;

TEST(EvaluateObjective, SingleQuadraticAtMinimizer) {
    const problem prob = make_quad_problem({Vec{0.0}});
    EXPECT_DOUBLE_EQ(evaluate_objective({Vec{0.0}}, prob), 0.0);
}

TEST(EvaluateObjective, BothMinimizersPresent) {
    const problem prob = make_quad_problem(centers_1d({1.0, -1.0}));
    EXPECT_DOUBLE_EQ(evaluate_objective({Vec{1.0}, Vec{-1.0}}, prob), 0.0);
}

TEST(EvaluateObjective, ThreeQuadraticsOneCenter) {
    // centers {0,1,2}, x = 1: (0.5 + 0 + 0.5)/3
    const problem prob = make_quad_problem(centers_1d({0.0, 1.0, 2.0}));
    EXPECT_NEAR(evaluate_objective({Vec{1.0}}, prob), 1.0 / 3.0, 1e-15);
}

TEST(EvaluateObjective, RejectsDimensionMismatch) {
    const problem prob = make_quad_problem({Vec{0.0, 0.0}});
    EXPECT_THROW(evaluate_objective({Vec{0.0}}, prob), invalid_input);
    EXPECT_THROW(evaluate_objective({}, prob), invalid_input);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(evaluate_objective({Vec{nan, 0.0}}, prob), invalid_input);
}

TEST(Reclassify, EachPointToOwnCenter) {
    const problem prob = make_quad_problem(centers_1d({0.0, 2.0}));
    const partition p = reclassify({Vec{0.0}, Vec{2.0}}, prob);
    EXPECT_EQ(p.assignment, (std::vector<std::size_t>{0, 1}));
}

TEST(Reclassify, TieBreaksToSmallestIndex) {
    const problem prob = make_quad_problem(centers_1d({0.0, 2.0}));
    const partition p = reclassify({Vec{1.0}, Vec{1.0}}, prob);
    EXPECT_EQ(p.assignment, (std::vector<std::size_t>{0, 0}));
}

TEST(Reclassify, MidpointTieGoesLow) {
    // centers {0,1,2}, params (0,2): f_2 ties at distance 1, lands in cluster 0
    const problem prob = make_quad_problem(centers_1d({0.0, 1.0, 2.0}));
    const partition p = reclassify({Vec{0.0}, Vec{2.0}}, prob);
    EXPECT_EQ(p.assignment, (std::vector<std::size_t>{0, 0, 1}));
}

TEST(Reclassify, PartitionFormMatchesObjective) {
    // Eq. (1) == partition reformulation for random instances
    rng gen(17);
    for (int rep = 0; rep < 25; ++rep) {
        const std::size_t n = 2 + gen.uniform_index(10);
        const std::size_t d = 1 + gen.uniform_index(4);
        const std::size_t k = 1 + gen.uniform_index(4);
        std::vector<Vec> centers;
        for (std::size_t i = 0; i < n; ++i) centers.push_back(gen.normal_vec(d));
        const problem prob = make_quad_problem(centers);
        std::vector<Vec> params;
        for (std::size_t j = 0; j < k; ++j) params.push_back(gen.normal_vec(d));

        const partition p = reclassify(params, prob);
        double partition_form = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            partition_form += prob.oracles[i]->value(params[p.assignment[i]]);
        partition_form /= static_cast<double>(n);
        EXPECT_NEAR(partition_form, evaluate_objective(params, prob), 1e-12);
    }
}

TEST(Reclassify, PermutationOfOraclesRelabelsAssignment) {
    rng gen(23);
    std::vector<Vec> centers;
    for (int i = 0; i < 8; ++i) centers.push_back(gen.normal_vec(3));
    std::vector<Vec> params = {gen.normal_vec(3), gen.normal_vec(3), gen.normal_vec(3)};

    const partition base = reclassify(params, make_quad_problem(centers));

    std::vector<std::size_t> perm(centers.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    gen.shuffle(perm);
    std::vector<Vec> shuffled(centers.size());
    for (std::size_t i = 0; i < perm.size(); ++i) shuffled[i] = centers[perm[i]];

    const partition permuted = reclassify(params, make_quad_problem(shuffled));
    for (std::size_t i = 0; i < perm.size(); ++i)
        EXPECT_EQ(permuted.assignment[i], base.assignment[perm[i]]);
}

TEST(GroupObjective, EmptyClusterIsZero) {
    const problem prob = make_quad_problem(centers_1d({5.0}));
    partition p{{0}, 2};
    const auto [value, grad] = group_objective(p, 1, {Vec{0.0}, Vec{1.0}}, prob);
    EXPECT_DOUBLE_EQ(value, 0.0);
    EXPECT_DOUBLE_EQ(grad[0], 0.0);
}

TEST(GroupObjective, SingleQuadratic) {
    const problem prob = make_quad_problem(centers_1d({1.0}));
    partition p{{0}, 1};
    const auto [value, grad] = group_objective(p, 0, {Vec{0.0}}, prob);
    EXPECT_DOUBLE_EQ(value, 0.5);
    EXPECT_DOUBLE_EQ(grad[0], -1.0);
}

TEST(GroupObjective, AveragesValuesAndGradients) {
    const problem prob = make_quad_problem(centers_1d({0.0, 2.0}));
    partition p{{0, 0}, 1};
    const auto [value, grad] = group_objective(p, 0, {Vec{0.0}}, prob);
    EXPECT_DOUBLE_EQ(value, 1.0);
    EXPECT_DOUBLE_EQ(grad[0], -1.0);
}

TEST(AveragedOptimalityGap, EqualsObjectiveForQuadratics) {
    rng gen(29);
    std::vector<Vec> centers;
    for (int i = 0; i < 6; ++i) centers.push_back(gen.normal_vec(2));
    const problem prob = make_quad_problem(centers);
    const std::vector<Vec> params = {gen.normal_vec(2), gen.normal_vec(2)};
    EXPECT_DOUBLE_EQ(averaged_optimality_gap(params, prob), evaluate_objective(params, prob));
}

TEST(AveragedOptimalityGap, ZeroAtFullMinimizerSet) {
    const problem prob = make_quad_problem(centers_1d({0.0, 3.0}));
    EXPECT_NEAR(averaged_optimality_gap({Vec{0.0}, Vec{3.0}}, prob), 0.0, 1e-12);
}

TEST(AveragedOptimalityGap, ThreeQuadraticsExample) {
    const problem prob = make_quad_problem(centers_1d({0.0, 1.0, 2.0}));
    EXPECT_NEAR(averaged_optimality_gap({Vec{1.0}}, prob), 1.0 / 3.0, 1e-15);
}

TEST(AveragedOptimalityGap, NonnegativeOnRandomParams) {
    rng gen(31);
    std::vector<Vec> centers;
    for (int i = 0; i < 10; ++i) centers.push_back(gen.normal_vec(3));
    const problem prob = make_quad_problem(centers);
    for (int rep = 0; rep < 50; ++rep) {
        const std::vector<Vec> params = {gen.normal_vec(3), gen.normal_vec(3)};
        EXPECT_GE(averaged_optimality_gap(params, prob), -1e-12);
    }
}

TEST(AveragedOptimalityGap, MissingOptValueIsUnsupported) {
    problem prob = make_quad_problem({Vec{0.0}});
    class no_opt final : public sub_function {
        double value(const Vec& x) const override { return x[0] * x[0]; }
        Vec gradient(const Vec& x) const override { return {2.0 * x[0]}; }
    };
    prob.oracles.push_back(std::make_shared<no_opt>());
    EXPECT_THROW(averaged_optimality_gap({Vec{0.0}}, prob), unsupported_oracle);
}
