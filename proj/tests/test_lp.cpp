#include "bal/lp.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace bal;

namespace {

Lp random_packing_lp(std::mt19937_64& rng, int nvars, int nrows) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Lp lp;
    for (int j = 0; j < nvars; ++j) lp.add_var("x" + std::to_string(j), u(rng));
    for (int i = 0; i < nrows; ++i) {
        std::vector<std::pair<int, double>> c;
        for (int j = 0; j < nvars; ++j) {
            if (u(rng) < 0.6) c.emplace_back(j, std::round(u(rng) * 8.0) / 4.0);
        }
        lp.add_row("r" + std::to_string(i), c, Rel::Le, 1.0 + std::round(u(rng) * 4.0));
    }
    for (int j = 0; j < nvars; ++j) lp.add_row("cap" + std::to_string(j), {{j, 1.0}}, Rel::Le, 3.0);
    return lp;
}

double dual_objective(const Lp& lp, const LpSolution& s) {
    double z = 0;
    for (int i = 0; i < lp.num_rows(); ++i) z += lp.rows[i].rhs * s.row_duals[i];
    return z;
}

} // namespace

TEST(Lp, SingleBound) {
    Lp lp;
    int x = lp.add_var("x", 1.0);
    lp.add_row("c", {{x, 1.0}}, Rel::Le, 3.0);
    auto s = solve(lp);
    ASSERT_EQ(s.status, LpStatus::Optimal);
    EXPECT_NEAR(s.x[0], 3.0, 1e-12);
    EXPECT_NEAR(s.objective, 3.0, 1e-12);
    EXPECT_NEAR(s.row_duals[0], 1.0, 1e-12);
}

TEST(Lp, DegenerateFace) {
    Lp lp;
    int x = lp.add_var("x", 1.0);
    int y = lp.add_var("y", 1.0);
    lp.add_row("c", {{x, 1.0}, {y, 1.0}}, Rel::Le, 1.0);
    auto s = solve(lp);
    ASSERT_EQ(s.status, LpStatus::Optimal);
    EXPECT_NEAR(s.objective, 1.0, 1e-12);
    EXPECT_NEAR(s.x[0] + s.x[1], 1.0, 1e-12);
}

TEST(Lp, EqualityAndGreaterRowsNeedPhaseOne) {
    // min x + 2y s.t. x + y = 4, x - y >= 1, y >= 0.5
    Lp lp;
    lp.sense = Sense::Min;
    int x = lp.add_var("x", 1.0);
    int y = lp.add_var("y", 2.0, 0.5);
    lp.add_row("sum", {{x, 1.0}, {y, 1.0}}, Rel::Eq, 4.0);
    lp.add_row("gap", {{x, 1.0}, {y, -1.0}}, Rel::Ge, 1.0);
    auto s = solve(lp);
    ASSERT_EQ(s.status, LpStatus::Optimal);
    EXPECT_NEAR(s.x[0], 3.5, 1e-9);
    EXPECT_NEAR(s.x[1], 0.5, 1e-9);
    EXPECT_NEAR(s.objective, 4.5, 1e-9);
    EXPECT_TRUE(check_point(lp, s.x).empty());
}

TEST(Lp, Infeasible) {
    Lp lp;
    int x = lp.add_var("x", 1.0);
    lp.add_row("a", {{x, 1.0}}, Rel::Le, 1.0);
    lp.add_row("b", {{x, 1.0}}, Rel::Ge, 2.0);
    EXPECT_EQ(solve(lp).status, LpStatus::Infeasible);
}

TEST(Lp, Unbounded) {
    Lp lp;
    int x = lp.add_var("x", 1.0);
    int y = lp.add_var("y", 0.0);
    lp.add_row("a", {{x, 1.0}, {y, -1.0}}, Rel::Le, 1.0);
    EXPECT_EQ(solve(lp).status, LpStatus::Unbounded);
}

TEST(Lp, FreeAndUpperBoundedVariables) {
    // max -|shifted| style: max -x s.t. x >= -2 via row, x free; y <= 5 upper bound only
    Lp lp;
    int x = lp.add_var("x", -1.0, std::nullopt, std::nullopt);
    int y = lp.add_var("y", 1.0, std::nullopt, 5.0);
    lp.add_row("xlo", {{x, 1.0}}, Rel::Ge, -2.0);
    lp.add_row("link", {{x, 1.0}, {y, 1.0}}, Rel::Le, 10.0);
    auto s = solve(lp);
    ASSERT_EQ(s.status, LpStatus::Optimal);
    EXPECT_NEAR(s.x[0], -2.0, 1e-9);
    EXPECT_NEAR(s.x[1], 5.0, 1e-9);
    EXPECT_NEAR(s.objective, 7.0, 1e-9);
}

TEST(Lp, BoxedVariable) {
    Lp lp;
    int x = lp.add_var("x", 1.0, 1.0, 2.5);
    int y = lp.add_var("y", 1.0, 0.0, 1.0);
    lp.add_row("c", {{x, 1.0}, {y, 2.0}}, Rel::Le, 3.0);
    auto s = solve(lp);
    ASSERT_EQ(s.status, LpStatus::Optimal);
    EXPECT_NEAR(s.objective, 2.5 + 0.25, 1e-9);
}

TEST(Lp, CheckPointReportsSingleViolation) {
    Lp lp;
    int x = lp.add_var("x", 1.0);
    int y = lp.add_var("y", 1.0);
    lp.add_row("a", {{x, 1.0}}, Rel::Le, 1.0);
    lp.add_row("b", {{x, 1.0}, {y, 1.0}}, Rel::Le, 2.0);
    EXPECT_TRUE(check_point(lp, {0.5, 0.5}).empty());
    auto v = check_point(lp, {1.5, 0.0});
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].name, "a");
    EXPECT_NEAR(v[0].slack, -0.5, 1e-12);
}

TEST(Lp, WeakDualityAndFeasibilityOnRandomInstances) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        Lp lp = random_packing_lp(rng, 6 + trial % 5, 4 + trial % 7);
        auto s = solve(lp);
        ASSERT_EQ(s.status, LpStatus::Optimal);
        EXPECT_TRUE(check_point(lp, s.x, 1e-7).empty());
        EXPECT_NEAR(objective_value(lp, s.x), s.objective, 1e-7);
        for (double y : s.row_duals) EXPECT_GE(y, -1e-9);
        // dual feasibility A^T y >= c
        std::vector<double> aty(lp.num_vars(), 0.0);
        for (int i = 0; i < lp.num_rows(); ++i) {
            for (auto [j, a] : lp.rows[i].coeffs) aty[j] += a * s.row_duals[i];
        }
        for (int j = 0; j < lp.num_vars(); ++j) EXPECT_GE(aty[j], lp.obj[j] - 1e-7);
        EXPECT_GE(dual_objective(lp, s), s.objective - 1e-6);
        EXPECT_NEAR(dual_objective(lp, s), s.objective, 1e-6);
    }
}

TEST(Lp, PermutedRowsSameObjective) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        Lp lp = random_packing_lp(rng, 8, 9);
        Lp perm = lp;
        std::shuffle(perm.rows.begin(), perm.rows.end(), rng);
        EXPECT_NEAR(solve(lp).objective, solve(perm).objective, 1e-9);
    }
}

TEST(Lp, ExactModeMatchesFloat) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        Lp lp = random_packing_lp(rng, 7, 6);
        auto f = solve(lp);
        auto e = solve(to_exact(lp));
        ASSERT_EQ(e.status, LpStatus::Optimal);
        EXPECT_NEAR(e.objective.get_d(), f.objective, 1e-9);
        EXPECT_TRUE(check_point(to_exact(lp), e.x).empty());
    }
}

TEST(Lp, ExactDualsCertifyOptimum) {
    ExactLp lp;
    int x = lp.add_var("x", mpq_class(3));
    int y = lp.add_var("y", mpq_class(2));
    lp.add_row("a", {{x, mpq_class(1)}, {y, mpq_class(1)}}, Rel::Le, mpq_class(4));
    lp.add_row("b", {{x, mpq_class(1)}, {y, mpq_class(3)}}, Rel::Le, mpq_class(6));
    lp.add_row("c", {{x, mpq_class(1)}}, Rel::Le, mpq_class(1, 3));
    auto s = solve(lp);
    ASSERT_EQ(s.status, LpStatus::Optimal);
    mpq_class dual = 4 * s.row_duals[0] + 6 * s.row_duals[1] + mpq_class(1, 3) * s.row_duals[2];
    EXPECT_EQ(dual, s.objective);
    EXPECT_EQ(s.objective, mpq_class(43, 9)); // x = 1/3, y = 17/9
}

TEST(Lp, IterationCapRaises) {
    std::mt19937_64 rng(5);
    Lp lp = random_packing_lp(rng, 10, 10);
    SolveOptions opt;
    opt.max_iterations = 1;
    EXPECT_THROW(solve(lp, opt), NumericalFailure);
}

TEST(Lp, JsonRoundTrip) {
    std::mt19937_64 rng(9);
    Lp lp = random_packing_lp(rng, 5, 4);
    lp.lo[1] = std::nullopt;
    lp.hi[2] = 2.0;
    Lp back = lp_from_json(to_json(lp));
    EXPECT_EQ(to_json(back), to_json(lp));
    EXPECT_NEAR(solve(back).objective, solve(lp).objective, 1e-12);
    EXPECT_THROW(lp_from_json(nlohmann::json{{"sense", "sideways"}}), ConfigError);
}
