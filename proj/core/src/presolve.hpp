#pragma once

// Internal to the LP core: ranged standard form and a light presolve
// (fixed columns, empty rows, singleton rows) with primal/dual postsolve.

#include <span>
#include <vector>

#include "capexp/lp_model.hpp"

namespace capexp::lp {

struct StdProblem {
    int m = 0;
    int n = 0;
    CscMatrix a;
    std::vector<double> c, lo, hi, row_lo, row_hi;
    double obj_const = 0.0;
};

StdProblem make_std_problem(const LpModel& model, std::span<const double> lower,
                            std::span<const double> upper);

class Presolver {
public:
    explicit Presolver(double tol) : tol_(tol) {}

    /// Returns false when infeasibility is detected.
    bool run(const StdProblem& full, StdProblem& reduced);

    void postsolve(const StdProblem& full, const std::vector<double>& x_reduced,
                   const std::vector<double>& y_reduced, bool with_duals, std::vector<double>& x,
                   std::vector<double>& y) const;

private:
    enum class OpKind { FixedCol, EmptyRow, SingletonRow };
    struct Op {
        OpKind kind;
        int row = -1;
        int col = -1;
        double coef = 0.0;
        double value = 0.0;  // fixed value
        double lo_row = 0.0, hi_row = 0.0;
        bool tightened_lo = false, tightened_hi = false;
    };

    double tol_;
    std::vector<Op> ops_;
    std::vector<int> kept_cols_, kept_rows_;
};

}  // namespace capexp::lp
