#include <gtest/gtest.h>

#include <random>

#include "capexp/simplex.hpp"
#include "oracles.hpp"

using namespace capexp;
using namespace capexp::lp;

namespace {

void expect_certified(const LpModel& model, const Solution& s)
{
    ASSERT_TRUE(s.optimal());
    EXPECT_LE(primal_residual(model, s.primal).max_violation, 1e-7);
    const DualityCertificate cert = check_duality(model, s);
    EXPECT_LE(cert.gap, 1e-7);
    EXPECT_LE(cert.max_dual_infeasibility, 1e-7);
}

}  // namespace

TEST(Simplex, UnitSimplexVertex)
{
    LpModel m;
    m.add_column("x", 0, 1, -1.0);
    m.add_column("y", 0, 1, -1.0);
    const Term t[] = {{0, 1.0}, {1, 1.0}};
    m.add_row("sum", t, RowSense::Le, 1.0);
    const Solution s = solve_lp(m);
    ASSERT_EQ(s.status, SolveStatus::Optimal);
    EXPECT_NEAR(s.objective, -1.0, 1e-9);
    EXPECT_NEAR(s.primal[0] + s.primal[1], 1.0, 1e-9);
    expect_certified(m, s);
}

TEST(Simplex, ContradictoryBoundIsInfeasible)
{
    LpModel m;
    m.add_column("x", 0, 3);
    const Term t[] = {{0, 1.0}};
    m.add_row("fix", t, RowSense::Eq, 5.0);
    EXPECT_EQ(solve_lp(m).status, SolveStatus::Infeasible);

    SimplexOptions raw;
    raw.presolve = false;
    EXPECT_EQ(solve_lp(m, raw).status, SolveStatus::Infeasible);
}

TEST(Simplex, InfeasibleRowPair)
{
    LpModel m;
    m.add_column("x", -kInf, kInf);
    m.add_column("y", -kInf, kInf);
    const Term t[] = {{0, 1.0}, {1, 1.0}};
    m.add_row("a", t, RowSense::Ge, 2.0);
    m.add_row("b", t, RowSense::Le, 1.0);
    EXPECT_EQ(solve_lp(m).status, SolveStatus::Infeasible);
}

TEST(Simplex, UnboundedRay)
{
    LpModel m;
    m.add_column("x", 0, kInf, -1.0);
    m.add_column("y", 0, kInf, 0.0);
    const Term t[] = {{0, 1.0}, {1, -1.0}};
    m.add_row("r", t, RowSense::Le, 1.0);
    EXPECT_EQ(solve_lp(m).status, SolveStatus::Unbounded);
}

TEST(Simplex, FreeVariablesAndEqualities)
{
    // min x + y with x - y = 1, x + y >= 3, free columns: optimum x=2, y=1.
    LpModel m;
    m.add_column("x", -kInf, kInf, 1.0);
    m.add_column("y", -kInf, kInf, 1.0);
    const Term diff[] = {{0, 1.0}, {1, -1.0}};
    const Term sum[] = {{0, 1.0}, {1, 1.0}};
    m.add_row("diff", diff, RowSense::Eq, 1.0);
    m.add_row("sum", sum, RowSense::Ge, 3.0);
    const Solution s = solve_lp(m);
    expect_certified(m, s);
    EXPECT_NEAR(s.primal[0], 2.0, 1e-9);
    EXPECT_NEAR(s.primal[1], 1.0, 1e-9);
    EXPECT_NEAR(s.objective, 3.0, 1e-9);
}

TEST(Simplex, BealeCyclingExampleTerminates)
{
    // Classic degenerate instance that cycles under textbook Dantzig pricing.
    LpModel m;
    const double c[] = {-0.75, 150.0, -0.02, 6.0};
    for (int j = 0; j < 4; ++j)
        m.add_column("x" + std::to_string(j), 0, kInf, c[j]);
    const Term r0[] = {{0, 0.25}, {1, -60.0}, {2, -0.04}, {3, 9.0}};
    const Term r1[] = {{0, 0.5}, {1, -90.0}, {2, -0.02}, {3, 3.0}};
    const Term r2[] = {{2, 1.0}};
    m.add_row("r0", r0, RowSense::Le, 0.0);
    m.add_row("r1", r1, RowSense::Le, 0.0);
    m.add_row("r2", r2, RowSense::Le, 1.0);
    for (bool presolve : {true, false}) {
        SimplexOptions o;
        o.presolve = presolve;
        o.bland_after_degenerate = 1;  // force the anti-cycling path
        const Solution s = solve_lp(m, o);
        expect_certified(m, s);
        EXPECT_NEAR(s.objective, -0.05, 1e-9);
    }
}

TEST(Simplex, ExplicitBoundOverride)
{
    LpModel m;
    m.add_column("x", 0, 10, -1.0);
    const std::vector<double> lo{0.0}, hi{4.0};
    const Solution s = solve_lp(m, lo, hi);
    ASSERT_TRUE(s.optimal());
    EXPECT_NEAR(s.primal[0], 4.0, 1e-12);
}

TEST(Simplex, EmptyModel)
{
    LpModel m;
    m.set_objective_constant(2.5);
    const Solution s = solve_lp(m);
    ASSERT_TRUE(s.optimal());
    EXPECT_DOUBLE_EQ(s.objective, 2.5);
}

TEST(Simplex, IterationLimitReported)
{
    std::mt19937_64 rng(7);
    const oracle::DenseLp p = oracle::random_lp(rng, 8, 6);
    SimplexOptions o;
    o.max_iterations = 1;
    o.presolve = false;
    const Solution s = solve_lp(oracle::to_model(p), o);
    EXPECT_TRUE(s.status == SolveStatus::IterationLimit || s.status == SolveStatus::Optimal);
    EXPECT_LE(s.stats.iterations, 1);
}

class RandomLpOracle : public ::testing::TestWithParam<int> {};

TEST_P(RandomLpOracle, MatchesVertexEnumeration)
{
    std::mt19937_64 rng(1000 + GetParam());
    std::uniform_int_distribution<int> nd(2, 8), md(1, 6);
    const int n = nd(rng), mrows = md(rng);
    const oracle::DenseLp p = oracle::random_lp(rng, n, mrows);
    const LpModel model = oracle::to_model(p);
    const auto expected = oracle::vertex_enumeration(p);
    for (bool presolve : {true, false}) {
        SimplexOptions o;
        o.presolve = presolve;
        const Solution s = solve_lp(model, o);
        if (!expected) {
            EXPECT_EQ(s.status, SolveStatus::Infeasible);
            continue;
        }
        expect_certified(model, s);
        EXPECT_NEAR(s.objective, *expected, 1e-7 * std::max(1.0, std::abs(*expected)));
    }
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomLpOracle, ::testing::Range(0, 50));

TEST(Simplex, WarmStartReusesOptimalBasis)
{
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        const oracle::DenseLp p = oracle::random_lp(rng, 8, 6);
        const LpModel model = oracle::to_model(p);
        Basis basis;
        const Solution cold = solve_lp(model, model.lower(), model.upper(), {}, &basis);
        if (cold.status != SolveStatus::Optimal)
            continue;
        ASSERT_EQ(basis.status.size(), static_cast<size_t>(model.num_cols() + model.num_rows()));
        Basis again = basis;
        const Solution warm = solve_lp(model, model.lower(), model.upper(), {}, &again);
        ASSERT_EQ(warm.status, SolveStatus::Optimal);
        EXPECT_EQ(warm.stats.iterations, 0);
        EXPECT_NEAR(warm.objective, cold.objective, 1e-9 * std::max(1.0, std::abs(cold.objective)));

        // tighten one bound: warm and cold agree
        std::vector<double> lo = model.lower(), hi = model.upper();
        hi[trial % 8] = std::min(hi[trial % 8], 0.5 * (lo[trial % 8] + std::min(hi[trial % 8], 10.0)));
        const Solution ref = solve_lp(model, lo, hi);
        Basis b2 = basis;
        const Solution w2 = solve_lp(model, lo, hi, {}, &b2);
        ASSERT_EQ(w2.status, ref.status);
        if (ref.status == SolveStatus::Optimal)
            EXPECT_NEAR(w2.objective, ref.objective, 1e-7 * std::max(1.0, std::abs(ref.objective)));
    }
}

TEST(Simplex, MismatchedWarmBasisFallsBack)
{
    LpModel m;
    m.add_column("x", 0, 4, -1.0);
    m.add_column("y", 0, 4, -1.0);
    const Term t[] = {{0, 1.0}, {1, 1.0}};
    m.add_row("r", t, RowSense::Le, 5.0);
    Basis junk;
    junk.status = {0, 0};  // wrong length
    const Solution s = solve_lp(m, m.lower(), m.upper(), {}, &junk);
    ASSERT_EQ(s.status, SolveStatus::Optimal);
    EXPECT_NEAR(s.objective, -5.0, 1e-9);
    EXPECT_EQ(junk.status.size(), 3u);
}

TEST(Simplex, LargerSparseLpIsCertified)
{
    // Transportation problem: 12 sources x 15 sinks, known to be feasible.
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(1.0, 10.0);
    const int S = 12, D = 15;
    std::vector<double> supply(S), demand(D);
    double total = 0.0;
    for (double& d : demand)
        total += d = u(rng);
    for (double& s : supply)
        s = 1.2 * total / S;
    LpModel m;
    for (int i = 0; i < S; ++i)
        for (int j = 0; j < D; ++j)
            m.add_column("f" + std::to_string(i) + "_" + std::to_string(j), 0, kInf, u(rng));
    for (int i = 0; i < S; ++i) {
        const int r = m.add_row("s" + std::to_string(i), RowSense::Le, supply[i]);
        for (int j = 0; j < D; ++j)
            m.add_coefficient(r, i * D + j, 1.0);
    }
    for (int j = 0; j < D; ++j) {
        const int r = m.add_row("d" + std::to_string(j), RowSense::Ge, demand[j]);
        for (int i = 0; i < S; ++i)
            m.add_coefficient(r, i * D + j, 1.0);
    }
    const Solution s = solve_lp(m);
    expect_certified(m, s);
}
