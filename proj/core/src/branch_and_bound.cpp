#include "capexp/branch_and_bound.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <queue>

#include "capexp/simplex.hpp"
#include "cuts.hpp"

namespace capexp::lp {

namespace {

struct Node {
    long id;
    int depth;
    double bound;
    std::vector<std::pair<int, double>> fixings;
    std::shared_ptr<const Basis> warm;  // parent's optimal basis
    int branch_col = -1;                // pseudocost bookkeeping
    double branch_frac = 0.0;           // distance moved by the branch
};

// Average objective degradation per unit of fractionality, per direction.
struct Pseudocosts {
    std::vector<double> sum[2];
    std::vector<int> count[2];

    explicit Pseudocosts(int n)
    {
        for (int k = 0; k < 2; ++k) {
            sum[k].assign(n, 0.0);
            count[k].assign(n, 0);
        }
    }

    void record(int j, int up, double gain_per_unit)
    {
        sum[up][j] += gain_per_unit;
        ++count[up][j];
    }

    double estimate(int j, int up, double fallback) const
    {
        return count[up][j] > 0 ? sum[up][j] / count[up][j] : fallback;
    }

    double fallback(int up) const
    {
        double s = 0.0;
        int c = 0;
        for (std::size_t j = 0; j < sum[up].size(); ++j) {
            s += sum[up][j];
            c += count[up][j];
        }
        return c > 0 ? s / c : 1.0;
    }
};

struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const
    {
        if (a.bound != b.bound)
            return a.bound > b.bound;
        return a.id > b.id;  // FIFO among ties keeps the search deterministic
    }
};

}  // namespace

Solution solve_bnb(const LpModel& model, const BnbOptions& opt, std::vector<BnbNodeRecord>* log)
{
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<int> binaries;
    for (int j = 0; j < model.num_cols(); ++j)
        if (model.is_binary(j))
            binaries.push_back(j);

    Solution best;
    best.status = SolveStatus::Infeasible;
    double incumbent = kInf;
    long nodes = 0, iterations = 0;

    std::vector<double> lower = model.lower(), upper = model.upper();

    // Root cut loop on a private copy; cuts are valid for the whole tree.
    LpModel work = model;
    auto root_basis = std::make_shared<Basis>();
    if (opt.cut_rounds > 0 && !binaries.empty()) {
        Solution r = solve_lp(work, lower, upper, opt.lp, root_basis.get());
        iterations += r.stats.iterations;
        double prev = r.objective;
        int added = 0;
        for (int round = 0; round < opt.cut_rounds && r.status == SolveStatus::Optimal; ++round) {
            auto cuts = gomory_cuts(work, lower, upper, *root_basis, r.primal, 0.01, opt.cuts_per_round);
            if (cuts.empty())
                break;
            for (const Cut& c : cuts) {
                work.add_row("gmi" + std::to_string(added++), c.terms, RowSense::Ge, c.rhs);
                root_basis->status.push_back(0);  // new logical enters the basis
            }
            r = solve_lp(work, lower, upper, opt.lp, root_basis.get());
            iterations += r.stats.iterations;
            if (r.status != SolveStatus::Optimal)
                break;
            const double gain = r.objective - prev;
            prev = r.objective;
            if (gain <= 1e-5 * std::max(1.0, std::abs(r.objective)))
                break;
        }
        if (r.status != SolveStatus::Optimal)
            root_basis->status.clear();
    }

    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    long next_id = 0;
    open.push(Node{next_id++, 0, -kInf, {}, root_basis});

    Pseudocosts pc(model.num_cols());
    auto pruned = [&](double bound) {
        return bound >= incumbent - std::max(opt.abs_gap, opt.rel_gap * std::abs(incumbent));
    };

    // Integral node or dive result: round binaries and keep it if it improves.
    auto accept = [&](Solution&& sol) {
        for (int j : binaries)
            sol.primal[j] = std::round(sol.primal[j]);
        sol.row_activity = model.row_activity(sol.primal);
        sol.objective = model.objective_value(sol.primal);
        if (sol.objective < incumbent) {
            incumbent = sol.objective;
            best = std::move(sol);
        }
    };

    // Fractional diving: repeatedly fix the least fractional binary (and any
    // nearly integral ones) to its rounded value and re-solve warm. One
    // retry with the opposite value when a fixing turns the LP infeasible.
    auto dive = [&](const Solution& start, const Basis& start_basis) {
        std::vector<double> lo = lower, hi = upper;
        Solution cur = start;
        Basis b = start_basis;
        for (std::size_t step = 0; step <= binaries.size(); ++step) {
            if (pruned(cur.objective))
                return;
            int pick = -1;
            double least = 1.0;
            std::vector<int> near;
            for (int j : binaries) {
                if (lo[j] == hi[j])
                    continue;
                const double v = cur.primal[j];
                const double f = std::abs(v - std::round(v));
                if (f <= opt.integrality_tol)
                    continue;
                if (f < 0.05)
                    near.push_back(j);
                if (f < least) {
                    least = f;
                    pick = j;
                }
            }
            if (pick < 0) {
                accept(std::move(cur));
                return;
            }
            const double target = std::round(cur.primal[pick]);
            for (int j : near)
                lo[j] = hi[j] = std::round(cur.primal[j]);
            lo[pick] = hi[pick] = target;
            Basis trial = b;
            Solution next = solve_lp(work, lo, hi, opt.lp, &trial);
            iterations += next.stats.iterations;
            if (next.status != SolveStatus::Optimal) {
                for (int j : near)
                    if (j != pick) {
                        lo[j] = lower[j];
                        hi[j] = upper[j];
                    }
                lo[pick] = hi[pick] = 1.0 - target;
                trial = b;
                next = solve_lp(work, lo, hi, opt.lp, &trial);
                iterations += next.stats.iterations;
                if (next.status != SolveStatus::Optimal)
                    return;
            }
            cur = std::move(next);
            b = std::move(trial);
        }
    };

    bool unbounded = false;
    while (!open.empty()) {
        if (pruned(open.top().bound))
            break;  // best-bound order: nothing left can improve
        if (nodes >= opt.node_limit)
            break;
        Node node = open.top();
        open.pop();

        lower = model.lower();
        upper = model.upper();
        for (auto [j, v] : node.fixings)
            lower[j] = upper[j] = v;
        Basis basis;
        if (node.warm)
            basis = *node.warm;
        Solution relax = solve_lp(work, lower, upper, opt.lp, &basis);
        ++nodes;
        if (node.branch_col >= 0 && relax.status == SolveStatus::Optimal && std::isfinite(node.bound) &&
            node.branch_frac > 0.0) {
            const int up = node.fixings.back().second > 0.5 ? 1 : 0;
            pc.record(node.branch_col, up, std::max(0.0, relax.objective - node.bound) / node.branch_frac);
        }
        iterations += relax.stats.iterations;

        BnbNodeRecord rec{node.id, node.depth, node.bound, kInf, incumbent};
        if (relax.status == SolveStatus::Unbounded) {
            unbounded = true;
            if (log)
                log->push_back(rec);
            break;
        }
        if (relax.status != SolveStatus::Optimal) {
            if (log)
                log->push_back(rec);
            continue;
        }
        rec.lp_objective = relax.objective;
        if (pruned(relax.objective)) {
            if (log)
                log->push_back(rec);
            continue;
        }

        // Product score over pseudocost estimates; uninitialized directions
        // use the running average so early choices are most-fractional.
        int branch_col = -1;
        double best_score = -1.0;
        const double fb_down = pc.fallback(0), fb_up = pc.fallback(1);
        for (int j : binaries) {
            const double v = relax.primal[j];
            const double f = v - std::floor(v);
            if (std::min(f, 1.0 - f) <= opt.integrality_tol)
                continue;
            const double down = pc.estimate(j, 0, fb_down) * f;
            const double upv = pc.estimate(j, 1, fb_up) * (1.0 - f);
            const double score = std::max(down, 1e-6) * std::max(upv, 1e-6);
            if (score > best_score + 1e-12) {
                best_score = score;
                branch_col = j;
            }
        }
        if (branch_col < 0) {
            accept(std::move(relax));
            rec.incumbent = incumbent;
            if (log)
                log->push_back(rec);
            continue;
        }
        if (opt.dive_interval > 0 && (nodes == 1 || nodes % opt.dive_interval == 0))
            dive(relax, basis);
        if (pruned(relax.objective)) {
            rec.incumbent = incumbent;
            if (log)
                log->push_back(rec);
            continue;
        }
        if (log)
            log->push_back(rec);
        auto warm = std::make_shared<const Basis>(std::move(basis));
        const double fv = relax.primal[branch_col] - std::floor(relax.primal[branch_col]);
        for (double v : {0.0, 1.0}) {
            Node child{next_id++, node.depth + 1, relax.objective, node.fixings, warm, branch_col,
                       v > 0.5 ? 1.0 - fv : fv};
            child.fixings.emplace_back(branch_col, v);
            open.push(std::move(child));
        }
    }

    double bound = incumbent;
    if (!open.empty())
        bound = std::min(bound, open.top().bound);

    if (unbounded) {
        best = Solution{};
        best.status = SolveStatus::Unbounded;
    } else if (std::isfinite(incumbent)) {
        const bool exhausted = open.empty() || pruned(open.top().bound);
        best.status = exhausted ? SolveStatus::Optimal : SolveStatus::NodeLimit;
        // Node-LP duals do not certify the integer program.
        best.row_dual.clear();
        best.reduced_cost.clear();
    } else {
        best = Solution{};
        best.status = open.empty() ? SolveStatus::Infeasible : SolveStatus::NodeLimit;
    }
    best.stats.nodes = nodes;
    best.stats.iterations = iterations;
    best.stats.best_bound = bound;
    best.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return best;
}

Solution BuiltinSolver::solve(const LpModel& model) const
{
    if (model.num_binaries() > 0)
        return solve_bnb(model, options_);
    return solve_lp(model, options_.lp);
}

}  // namespace capexp::lp
