#include <gtest/gtest.h>

#include "capexp/error.hpp"
#include "capexp/lp_model.hpp"

using namespace capexp;
using namespace capexp::lp;

TEST(LpModel, DuplicateTripletsAreSummed)
{
    LpModel m;
    const int x = m.add_column("x", 0, 1, 1.0);
    const int r = m.add_row("r", RowSense::Le, 2.0);
    m.add_coefficient(r, x, 1.5);
    m.add_coefficient(r, x, 0.5);
    const CscMatrix a = m.column_matrix();
    ASSERT_EQ(a.index.size(), 1u);
    EXPECT_DOUBLE_EQ(a.value[0], 2.0);
}

TEST(LpModel, CancellingTripletsLeaveNoEntry)
{
    LpModel m;
    const int x = m.add_column("x", 0, 1);
    const int r = m.add_row("r", RowSense::Eq, 0.0);
    m.add_coefficient(r, x, 1.0);
    m.add_coefficient(r, x, -1.0);
    EXPECT_TRUE(m.column_matrix().index.empty());
}

TEST(LpModel, RowMatrixIsTranspose)
{
    LpModel m;
    m.add_column("a", 0, 1);
    m.add_column("b", 0, 1);
    m.add_row("r0", RowSense::Le, 1);
    m.add_row("r1", RowSense::Ge, 0);
    m.add_coefficient(0, 1, 3.0);
    m.add_coefficient(1, 0, 2.0);
    m.add_coefficient(1, 1, -1.0);
    const CscMatrix rm = m.row_matrix();
    ASSERT_EQ(rm.start.size(), 3u);
    EXPECT_EQ(rm.start[1] - rm.start[0], 1);
    EXPECT_EQ(rm.start[2] - rm.start[1], 2);
}

TEST(LpModel, NamesAreUnique)
{
    LpModel m;
    m.add_column("x", 0, 1);
    EXPECT_THROW(m.add_column("x", 0, 1), Error);
    m.add_row("r", RowSense::Le, 0);
    EXPECT_THROW(m.add_row("r", RowSense::Le, 0), Error);
    EXPECT_EQ(m.find_col("x").value(), 0);
    EXPECT_FALSE(m.find_col("y").has_value());
}

TEST(LpModel, ValidateRejectsCrossedBoundsAndBadRhs)
{
    LpModel m;
    m.add_column("x", 2, 1);
    try {
        m.validate();
        FAIL() << "expected ValidationError";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ValidationError);
        EXPECT_NE(std::string(e.what()).find("x"), std::string::npos);
    }

    LpModel k;
    k.add_column("x", 0, 1);
    k.add_row("r", RowSense::Le, kInf);
    EXPECT_THROW(k.validate(), Error);
}

TEST(LpModel, ObjectiveAndActivity)
{
    LpModel m;
    m.add_column("x", 0, 10, 2.0);
    m.add_column("y", 0, 10, -1.0);
    m.set_objective_constant(5.0);
    m.add_row("r", RowSense::Ge, 1.0);
    m.add_coefficient(0, 0, 1.0);
    m.add_coefficient(0, 1, 3.0);
    const std::vector<double> x{1.0, 2.0};
    EXPECT_DOUBLE_EQ(m.objective_value(x), 5.0 + 2.0 - 2.0);
    EXPECT_DOUBLE_EQ(m.row_activity(x)[0], 7.0);
}

TEST(LpModel, PrimalResidualNamesWorstRow)
{
    LpModel m;
    m.add_column("x", 0, 10);
    m.add_row("loose", RowSense::Le, 10.0);
    m.add_row("tight", RowSense::Le, 1.0);
    m.add_coefficient(0, 0, 1.0);
    m.add_coefficient(1, 0, 1.0);
    const std::vector<double> x{1.5};
    const Residual r = primal_residual(m, x);
    EXPECT_EQ(r.worst_row, 1);
    EXPECT_NEAR(r.max_violation, 0.5, 1e-12);
}
