#pragma once

#include <memory>
#include <string>
#include <vector>

#include "capexp/lp_model.hpp"
#include "capexp/simplex.hpp"

namespace capexp::lp {

struct BnbOptions {
    SimplexOptions lp;
    double integrality_tol = 1e-6;
    double abs_gap = 1e-9;
    double rel_gap = 1e-9;
    long node_limit = 200000;
    long dive_interval = 100;  // diving heuristic at the root and every N nodes; 0 = off
    int cut_rounds = 20;       // Gomory rounds at the root; 0 = off
    int cuts_per_round = 100;
};

/// One entry per solved node, in processing order.
struct BnbNodeRecord {
    long id = 0;
    int depth = 0;
    double parent_bound = 0.0;
    double lp_objective = 0.0;  // +inf when the node LP is infeasible
    double incumbent = kInf;    // incumbent after processing the node
};

/// Best-bound branch and bound over the binary-marked columns, branching on
/// the most fractional binary. Intended for desk-scale models (a few hundred
/// binaries at most). On NodeLimit the incumbent (if any) is returned and
/// stats.best_bound carries the remaining lower bound.
Solution solve_bnb(const LpModel& model, const BnbOptions& options = {},
                   std::vector<BnbNodeRecord>* node_log = nullptr);

/// Pluggable solver endpoint; callers depend only on solve(model).
class Solver {
public:
    virtual ~Solver() = default;
    virtual Solution solve(const LpModel& model) const = 0;
    virtual std::string name() const = 0;
};

/// Simplex for pure LPs, branch and bound when binaries are present.
class BuiltinSolver final : public Solver {
public:
    explicit BuiltinSolver(BnbOptions options = {}) : options_(options) {}
    Solution solve(const LpModel& model) const override;
    std::string name() const override { return "builtin"; }

private:
    BnbOptions options_;
};

}  // namespace capexp::lp
