#include <gtest/gtest.h>

#include <random>

#include "capexp/branch_and_bound.hpp"
#include "oracles.hpp"

using namespace capexp;
using namespace capexp::lp;

TEST(BranchAndBound, KnapsackMatchesEnumeration)
{
    // max 10a + 13b + 7c s.t. 4a + 6b + 3c <= 9
    const double value[] = {10, 13, 7}, weight[] = {4, 6, 3};
    LpModel m;
    for (int j = 0; j < 3; ++j)
        m.add_column("z" + std::to_string(j), 0, 1, -value[j], true);
    const int r = m.add_row("cap", RowSense::Le, 9.0);
    for (int j = 0; j < 3; ++j)
        m.add_coefficient(r, j, weight[j]);

    double best = 0.0;
    for (int mask = 0; mask < 8; ++mask) {
        double w = 0, v = 0;
        for (int j = 0; j < 3; ++j)
            if (mask >> j & 1) {
                w += weight[j];
                v += value[j];
            }
        if (w <= 9)
            best = std::max(best, v);
    }
    const Solution s = solve_bnb(m);
    ASSERT_EQ(s.status, SolveStatus::Optimal);
    EXPECT_NEAR(s.objective, -best, 1e-9);
    for (int j = 0; j < 3; ++j)
        EXPECT_TRUE(s.primal[j] == 0.0 || s.primal[j] == 1.0);
}

TEST(BranchAndBound, IntegralRelaxationNeedsOneNode)
{
    LpModel m;
    m.add_column("a", 0, 1, -1.0, true);
    m.add_column("b", 0, 1, 2.0, true);
    const Term t[] = {{0, 1.0}, {1, 1.0}};
    m.add_row("r", t, RowSense::Le, 1.0);
    const Solution s = solve_bnb(m);
    ASSERT_EQ(s.status, SolveStatus::Optimal);
    EXPECT_EQ(s.stats.nodes, 1);
    EXPECT_NEAR(s.objective, -1.0, 1e-12);
}

TEST(BranchAndBound, IntegerInfeasibleWithFeasibleRelaxation)
{
    // 2a + 2b = 1 has the relaxed solution a = 0.5 but no 0/1 point.
    LpModel m;
    m.add_column("a", 0, 1, 0.0, true);
    m.add_column("b", 0, 1, 0.0, true);
    const Term t[] = {{0, 2.0}, {1, 2.0}};
    m.add_row("odd", t, RowSense::Eq, 1.0);
    ASSERT_TRUE(solve_lp(m).optimal());
    oracle::DenseLp p;
    p.n = 2;
    p.a = {{2, 2}};
    p.sense = {RowSense::Eq};
    p.b = {1};
    p.c = {0, 0};
    p.lo = {0, 0};
    p.hi = {1, 1};
    p.binary = {1, 1};
    ASSERT_FALSE(oracle::enumerate_mip(p).has_value());
    const Solution s = solve_bnb(m);
    EXPECT_EQ(s.status, SolveStatus::Infeasible);
    EXPECT_GT(s.stats.nodes, 1);
}

TEST(BranchAndBound, NodeLimitReturnsIncumbentAndBound)
{
    std::mt19937_64 rng(11);
    oracle::DenseLp p = oracle::random_lp(rng, 10, 4, true);
    p.binary.assign(10, 1);
    BnbOptions o;
    o.node_limit = 2;
    const Solution s = solve_bnb(oracle::to_model(p), o);
    EXPECT_LE(s.stats.nodes, 2);
    if (s.status == SolveStatus::NodeLimit && !s.primal.empty())
        EXPECT_LE(s.stats.best_bound, s.objective + 1e-9);
}

TEST(BranchAndBound, IncumbentNeverBelowNodeRelaxation)
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 5; ++trial) {
        oracle::DenseLp p = oracle::random_lp(rng, 9, 5, true);
        p.binary.assign(9, 1);
        std::vector<BnbNodeRecord> nodes;
        const Solution s = solve_bnb(oracle::to_model(p), {}, &nodes);
        ASSERT_FALSE(nodes.empty());
        const double root = nodes.front().lp_objective;
        for (const BnbNodeRecord& n : nodes) {
            if (std::isfinite(n.lp_objective))
                EXPECT_GE(n.lp_objective, n.parent_bound - 1e-9);
            if (std::isfinite(n.incumbent))
                EXPECT_GE(n.incumbent, root - 1e-9);
        }
        if (s.optimal())
            EXPECT_GE(s.objective, root - 1e-9);
    }
}

class RandomMipOracle : public ::testing::TestWithParam<int> {};

TEST_P(RandomMipOracle, MatchesExhaustiveEnumeration)
{
    std::mt19937_64 rng(500 + GetParam());
    const bool pure = GetParam() % 2 == 0;
    oracle::DenseLp p;
    if (pure) {
        std::uniform_int_distribution<int> nd(3, 10), md(1, 5);
        const int n = nd(rng);
        p = oracle::random_lp(rng, n, md(rng), true);
        p.binary.assign(n, 1);
    } else {
        std::uniform_int_distribution<int> nd(3, 6), md(1, 4);
        const int n = nd(rng);
        p = oracle::random_lp(rng, n, md(rng));
        p.binary.assign(n, 0);
        for (int j = 0; j < n; j += 2) {
            p.binary[j] = 1;
            p.lo[j] = 0.0;
            p.hi[j] = 1.0;
        }
    }
    const auto expected = oracle::enumerate_mip(p);
    // root cuts and diving must not change the answer
    BnbOptions plain;
    plain.cut_rounds = 0;
    plain.dive_interval = 0;
    for (const BnbOptions& o : {BnbOptions{}, plain}) {
        const Solution s = solve_bnb(oracle::to_model(p), o);
        if (!expected) {
            EXPECT_EQ(s.status, SolveStatus::Infeasible);
            continue;
        }
        ASSERT_EQ(s.status, SolveStatus::Optimal);
        if (pure)
            EXPECT_EQ(std::round(s.objective), std::round(*expected));
        EXPECT_NEAR(s.objective, *expected, 1e-7 * std::max(1.0, std::abs(*expected)));
    }
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomMipOracle, ::testing::Range(0, 20));

// Wider pure-binary instances with many fractional vertices, where root
// cuts are active.
class RandomCutOracle : public ::testing::TestWithParam<int> {};

TEST_P(RandomCutOracle, CutsPreserveIntegerOptimum)
{
    std::mt19937_64 rng(9000 + GetParam());
    std::uniform_int_distribution<int> md(2, 6);
    oracle::DenseLp p = oracle::random_lp(rng, 12, md(rng), true);
    p.binary.assign(12, 1);
    for (int j = 0; j < 12; ++j) {
        p.lo[j] = 0.0;
        p.hi[j] = 1.0;
    }
    const auto expected = oracle::enumerate_mip(p);
    BnbOptions o;
    o.cut_rounds = 50;
    const Solution s = solve_bnb(oracle::to_model(p), o);
    if (!expected) {
        EXPECT_EQ(s.status, SolveStatus::Infeasible);
        return;
    }
    ASSERT_EQ(s.status, SolveStatus::Optimal);
    EXPECT_NEAR(s.objective, *expected, 1e-7 * std::max(1.0, std::abs(*expected)));
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomCutOracle, ::testing::Range(0, 40));

TEST(BuiltinSolver, DispatchesOnBinaries)
{
    LpModel m;
    m.add_column("a", 0, 1, -1.0, true);
    m.add_column("b", 0, 1, -1.0, true);
    const Term t[] = {{0, 2.0}, {1, 2.0}};
    m.add_row("r", t, RowSense::Le, 3.0);
    const BuiltinSolver solver;
    const Solution s = solver.solve(m);
    ASSERT_TRUE(s.optimal());
    EXPECT_NEAR(s.objective, -1.0, 1e-9);
    EXPECT_EQ(solver.name(), "builtin");
}
