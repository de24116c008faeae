#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "capexp/error.hpp"
#include "capexp/mps.hpp"
#include "capexp/simplex.hpp"
#include "capexp/solution_io.hpp"
#include "oracles.hpp"

using namespace capexp;
using namespace capexp::lp;

namespace {

LpModel two_var_model()
{
    LpModel m;
    const int x = m.add_column("x", 0.0, 10.0, -1.0);
    const int y = m.add_column("y", 0.0, 1.0, -3.0, true);
    const Term cap[] = {{x, 1.0}, {y, 2.0}};
    const Term mix[] = {{x, 1.0}, {y, -1.0}};
    m.add_row("cap", cap, RowSense::Le, 6.0);
    m.add_row("mix", mix, RowSense::Ge, 1.0);
    m.set_objective_constant(0.5);
    return m;
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Mps, TwoVarGoldenFile)
{
    std::ostringstream out;
    write_mps(two_var_model(), out);
    EXPECT_EQ(out.str(), slurp(CAPEXP_FIXTURE_DIR "/two_var.mps"));
}

TEST(Mps, FreeColumnGetsFrBound)
{
    LpModel m;
    m.add_column("free", -kInf, kInf, 1.0);
    m.add_column("neg", -kInf, 2.0, 1.0);
    std::ostringstream out;
    write_mps(m, out);
    EXPECT_NE(out.str().find(" FR BND       free"), std::string::npos);
    EXPECT_NE(out.str().find(" MI BND       neg"), std::string::npos);
}

TEST(Mps, EmptyModelIsRefused)
{
    std::ostringstream out;
    try {
        write_mps(LpModel{}, out);
        FAIL() << "expected ValidationError";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ValidationError);
    }
}

TEST(Mps, UnsafeNamesNeedGenericMode)
{
    LpModel m;
    m.add_column("has space", 0, 1, 1.0);
    std::ostringstream out;
    EXPECT_THROW(write_mps(m, out), Error);
    MpsOptions o;
    o.generic_names = true;
    std::ostringstream ok;
    write_mps(m, ok, o);
    EXPECT_NE(ok.str().find("C0000001"), std::string::npos);
}

TEST(Mps, UnwritablePathIsIoError)
{
    try {
        write_mps(two_var_model(), std::filesystem::path("/nonexistent-dir/x.mps"));
        FAIL() << "expected IoError";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::IoError);
    }
}

TEST(Mps, ReadBackReproducesModel)
{
    const LpModel m = two_var_model();
    std::stringstream buf;
    write_mps(m, buf);
    const LpModel r = read_mps(buf);
    ASSERT_EQ(r.num_cols(), m.num_cols());
    ASSERT_EQ(r.num_rows(), m.num_rows());
    EXPECT_TRUE(r.is_binary(1));
    EXPECT_FALSE(r.is_binary(0));
    EXPECT_DOUBLE_EQ(r.objective_constant(), 0.5);
    EXPECT_DOUBLE_EQ(r.col_upper(0), 10.0);
    EXPECT_EQ(r.row_sense(1), RowSense::Ge);
    std::stringstream again;
    write_mps(r, again);
    EXPECT_EQ(again.str(), buf.str());
}

TEST(Mps, RandomRoundTripPreservesObjective)
{
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 10; ++trial) {
        const LpModel m = oracle::to_model(oracle::random_lp(rng, 6, 4));
        const Solution s = solve_lp(m);
        if (!s.optimal())
            continue;
        std::stringstream buf;
        write_mps(m, buf);
        const LpModel r = read_mps(buf);
        const double o1 = m.objective_value(s.primal), o2 = r.objective_value(s.primal);
        EXPECT_NEAR(o1, o2, 1e-6 * std::max(1.0, std::abs(o1)));
        EXPECT_LE(primal_residual(r, s.primal).max_violation, 1e-6);
    }
}

TEST(SolutionIo, RoundTripIsIdentical)
{
    LpModel m = two_var_model();
    m.set_binary(1, false);
    const Solution s = solve_lp(m);
    ASSERT_TRUE(s.optimal());
    std::stringstream buf;
    write_solution_csv(m, s, buf);
    const Solution r = read_external_solution(m, buf);
    EXPECT_EQ(r.status, SolveStatus::Feasible);
    EXPECT_EQ(r.primal, s.primal);
    EXPECT_DOUBLE_EQ(r.objective, s.objective);
    for (int i = 0; i < m.num_rows(); ++i)
        EXPECT_DOUBLE_EQ(r.row_activity[i], s.row_activity[i]);
}

TEST(SolutionIo, QuotedNamesSurvive)
{
    LpModel m;
    m.add_column("P_coal[small,t=1]", 0, 5, 1.0);
    Solution s;
    s.primal = {2.5};
    std::stringstream buf;
    write_solution_csv(m, s, buf);
    EXPECT_DOUBLE_EQ(read_external_solution(m, buf).primal[0], 2.5);
}

TEST(SolutionIo, MissingColumnIsNamed)
{
    const LpModel m = two_var_model();
    std::stringstream buf("name,value\nx,1.0\n");
    try {
        read_external_solution(m, buf);
        FAIL() << "expected MissingColumn";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::MissingColumn);
        EXPECT_NE(std::string(e.what()).find("'y'"), std::string::npos);
    }
}

TEST(SolutionIo, UnknownColumnRejected)
{
    const LpModel m = two_var_model();
    std::stringstream buf("name,value\nx,1\ny,0\nz,3\n");
    try {
        read_external_solution(m, buf);
        FAIL() << "expected UnknownColumn";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::UnknownColumn);
    }
}

TEST(SolutionIo, PerturbedBindingRowIsDetected)
{
    // At the optimum x = 4, y = 1 the row cap (x + 2y <= 6) is binding.
    LpModel m = two_var_model();
    m.set_binary(1, false);
    const Solution s = solve_lp(m);
    ASSERT_TRUE(s.optimal());
    ASSERT_NEAR(s.row_activity[0], 6.0, 1e-9);
    Solution bumped = s;
    bumped.primal[0] += 1e-2;
    std::stringstream buf;
    write_solution_csv(m, bumped, buf);
    try {
        read_external_solution(m, buf);
        FAIL() << "expected ResidualTooLarge";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ResidualTooLarge);
        EXPECT_NE(std::string(e.what()).find("'cap'"), std::string::npos);
    }
}
