#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "capexp/lp_model.hpp"

namespace capexp::lp {

/// Tolerances apply to the scaled problem; the returned Solution is always in
/// the original model's units.
struct SimplexOptions {
    double feasibility_tol = 1e-7;
    double optimality_tol = 1e-7;
    double pivot_tol = 1e-9;
    long max_iterations = 0;  // 0 = automatic budget proportional to size
    int refactor_interval = 100;
    int bland_after_degenerate = 50;
    bool presolve = true;
    bool scale = true;
};

/// Bounded-variable primal revised simplex (composite phase 1, Dantzig pricing
/// with a Bland fallback on degeneracy streaks). Binary marks are ignored, so
/// this solves the continuous relaxation of a MIP.
Solution solve_lp(const LpModel& model, const SimplexOptions& options = {});

/// Same as solve_lp with column bounds replaced by the given arrays.
Solution solve_lp(const LpModel& model, std::span<const double> lower,
                  std::span<const double> upper, const SimplexOptions& options = {});

/// Basis snapshot over structural columns followed by row logicals.
/// Status codes: 0 basic, 1 at lower, 2 at upper, 3 free.
struct Basis {
    std::vector<std::uint8_t> status;
};

/// Warm-startable variant. Presolve is skipped so the basis indexes the full
/// problem; an empty or unusable basis falls back to the slack basis. On an
/// Optimal return the final basis is written back.
Solution solve_lp(const LpModel& model, std::span<const double> lower,
                  std::span<const double> upper, const SimplexOptions& options, Basis* basis);

}  // namespace capexp::lp
