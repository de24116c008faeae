#include "capexp/simplex.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "capexp/error.hpp"
#include "presolve.hpp"

namespace capexp::lp {

namespace {

enum class VarState : std::uint8_t { Basic, AtLower, AtUpper, Free };

struct Eta {
    int pos;
    double pivot;
    std::vector<std::pair<int, double>> column;  // entries other than pos
};

struct CoreResult {
    SolveStatus status = SolveStatus::Infeasible;
    std::vector<double> x;  // structural, scaled
    std::vector<double> y;
    std::vector<double> d;  // structural reduced costs, scaled
    long iterations = 0;
    std::vector<std::uint8_t> basis;  // VarState per column, Optimal only
};

/// Primal simplex on min c'x, row_lo <= Ax <= row_hi, lo <= x <= hi, using one
/// logical column r_i = a_i x per row (matrix [A  -I], right-hand side zero).
class SimplexCore {
public:
    SimplexCore(const CscMatrix& a, const StdProblem& p, const SimplexOptions& opt)
        : a_(a), opt_(opt), m_(p.m), n_(p.n), ntot_(p.n + p.m)
    {
        lb_.resize(ntot_);
        ub_.resize(ntot_);
        cost_.assign(ntot_, 0.0);
        for (int j = 0; j < n_; ++j) {
            lb_[j] = p.lo[j];
            ub_[j] = p.hi[j];
            cost_[j] = p.c[j];
        }
        for (int i = 0; i < m_; ++i) {
            lb_[n_ + i] = p.row_lo[i];
            ub_[n_ + i] = p.row_hi[i];
        }
        x_.assign(ntot_, 0.0);
        state_.assign(ntot_, VarState::AtLower);
        head_.assign(m_, -1);
        pos_.assign(ntot_, -1);
        max_iter_ = opt.max_iterations > 0 ? opt.max_iterations
                                           : std::max<long>(20000, 40L * (m_ + n_));
    }

    CoreResult run(const std::vector<std::uint8_t>* warm = nullptr)
    {
        CoreResult res;
        if (!warm || !warm_basis(*warm))
            slack_basis();
        SolveStatus status = SolveStatus::Optimal;
        int recoveries = 0;
        for (;;) {
            status = iterate();
            if (status == SolveStatus::Infeasible && recoveries == 0) {
                ++recoveries;
                if (refactor()) {
                    compute_basic_values();
                    if (max_infeasibility() <= opt_.feasibility_tol)
                        continue;
                    status = iterate();
                }
            }
            if (status == SolveStatus::Optimal) {
                // Confirm against a fresh factorization before declaring victory.
                if (!refactor()) {
                    if (++recoveries > 3)
                        break;
                    slack_basis();
                    continue;
                }
                compute_basic_values();
                if (max_infeasibility() > opt_.feasibility_tol || !phase2_optimal()) {
                    if (++recoveries > 3) {
                        status = max_infeasibility() > opt_.feasibility_tol ? SolveStatus::Infeasible
                                                                             : SolveStatus::Optimal;
                        break;
                    }
                    continue;
                }
            }
            break;
        }
        res.status = status;
        res.iterations = iterations_;
        res.x.assign(x_.begin(), x_.begin() + n_);
        if (status == SolveStatus::Optimal) {
            set_phase_costs(false);
            std::vector<double> y = dual_values();
            res.d.resize(n_);
            for (int j = 0; j < n_; ++j)
                res.d[j] = reduced_cost(j, y);
            res.y = std::move(y);
            res.basis.resize(ntot_);
            for (int j = 0; j < ntot_; ++j)
                res.basis[j] = static_cast<std::uint8_t>(state_[j]);
        }
        return res;
    }

private:
    const CscMatrix& a_;
    const SimplexOptions& opt_;
    int m_, n_, ntot_;
    std::vector<double> lb_, ub_, cost_, x_;
    std::vector<double> phase_cost_;
    std::vector<VarState> state_;
    std::vector<int> head_, pos_;
    long iterations_ = 0, max_iter_ = 0;
    bool phase1_ = true;
    bool bland_ = false;
    int degenerate_streak_ = 0;

    using SpMat = Eigen::SparseMatrix<double>;
    mutable Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu_;
    std::vector<Eta> etas_;

    static double nonbasic_value(double lo, double hi, VarState& st)
    {
        if (std::isfinite(lo)) {
            st = VarState::AtLower;
            return lo;
        }
        if (std::isfinite(hi)) {
            st = VarState::AtUpper;
            return hi;
        }
        st = VarState::Free;
        return 0.0;
    }

    void slack_basis()
    {
        for (int j = 0; j < ntot_; ++j)
            pos_[j] = -1;
        for (int j = 0; j < n_; ++j) {
            VarState st;
            double v = x_[j];
            if (state_[j] == VarState::Basic || !(v >= lb_[j] && v <= ub_[j])) {
                v = nonbasic_value(lb_[j], ub_[j], st);
            } else {
                // Keep the previous nonbasic position when it is a bound.
                if (v == lb_[j])
                    st = VarState::AtLower;
                else if (v == ub_[j])
                    st = VarState::AtUpper;
                else
                    v = nonbasic_value(lb_[j], ub_[j], st);
            }
            x_[j] = v;
            state_[j] = st;
        }
        for (int i = 0; i < m_; ++i) {
            head_[i] = n_ + i;
            pos_[n_ + i] = i;
            state_[n_ + i] = VarState::Basic;
        }
        etas_.clear();
        refactor();
        compute_basic_values();
    }

    bool warm_basis(const std::vector<std::uint8_t>& warm)
    {
        if (static_cast<int>(warm.size()) != ntot_)
            return false;
        int basics = 0;
        for (std::uint8_t s : warm)
            basics += s == static_cast<std::uint8_t>(VarState::Basic);
        if (basics != m_)
            return false;
        int p = 0;
        for (int j = 0; j < ntot_; ++j) {
            const auto st = static_cast<VarState>(warm[j]);
            pos_[j] = -1;
            if (st == VarState::Basic) {
                head_[p] = j;
                pos_[j] = p++;
                state_[j] = VarState::Basic;
                continue;
            }
            VarState s = st;
            double v;
            if (st == VarState::AtLower && std::isfinite(lb_[j]))
                v = lb_[j];
            else if (st == VarState::AtUpper && std::isfinite(ub_[j]))
                v = ub_[j];
            else
                v = nonbasic_value(lb_[j], ub_[j], s);
            x_[j] = v;
            state_[j] = s;
        }
        etas_.clear();
        if (!refactor()) {
            std::fill(state_.begin(), state_.end(), VarState::AtLower);
            return false;
        }
        compute_basic_values();
        return true;
    }

    template <class F>
    void for_column(int j, F&& f) const
    {
        if (j < n_) {
            for (int k = a_.start[j]; k < a_.start[j + 1]; ++k)
                f(a_.index[k], a_.value[k]);
        } else {
            f(j - n_, -1.0);
        }
    }

    bool refactor()
    {
        etas_.clear();
        if (m_ == 0)
            return true;
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(static_cast<std::size_t>(m_) * 3);
        for (int p = 0; p < m_; ++p)
            for_column(head_[p], [&](int i, double v) { trips.emplace_back(i, p, v); });
        SpMat b(m_, m_);
        b.setFromTriplets(trips.begin(), trips.end());
        b.makeCompressed();
        lu_.compute(b);
        return lu_.info() == Eigen::Success;
    }

    Eigen::VectorXd ftran(Eigen::VectorXd v) const
    {
        if (m_ == 0)
            return v;
        v = lu_.solve(v);
        for (const Eta& e : etas_) {
            const double vr = v[e.pos] / e.pivot;
            v[e.pos] = vr;
            if (vr != 0.0)
                for (auto [i, a] : e.column)
                    v[i] -= a * vr;
        }
        return v;
    }

    Eigen::VectorXd btran(Eigen::VectorXd v) const
    {
        if (m_ == 0)
            return v;
        for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
            double s = v[it->pos];
            for (auto [i, a] : it->column)
                s -= a * v[i];
            v[it->pos] = s / it->pivot;
        }
        return lu_.transpose().solve(v);
    }

    void compute_basic_values()
    {
        if (m_ == 0)
            return;
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m_);
        for (int j = 0; j < ntot_; ++j) {
            if (state_[j] == VarState::Basic || x_[j] == 0.0)
                continue;
            const double xj = x_[j];
            for_column(j, [&](int i, double v) { rhs[i] -= v * xj; });
        }
        Eigen::VectorXd xb = ftran(rhs);
        for (int p = 0; p < m_; ++p)
            x_[head_[p]] = xb[p];
    }

    double infeasibility(int j) const
    {
        if (x_[j] < lb_[j])
            return lb_[j] - x_[j];
        if (x_[j] > ub_[j])
            return x_[j] - ub_[j];
        return 0.0;
    }

    double max_infeasibility() const
    {
        double worst = 0.0;
        for (int p = 0; p < m_; ++p)
            worst = std::max(worst, infeasibility(head_[p]));
        return worst;
    }

    void set_phase_costs(bool phase1)
    {
        phase1_ = phase1;
        if (!phase1) {
            phase_cost_ = cost_;
            return;
        }
        phase_cost_.assign(ntot_, 0.0);
        const double tol = opt_.feasibility_tol;
        for (int p = 0; p < m_; ++p) {
            const int j = head_[p];
            if (x_[j] < lb_[j] - tol)
                phase_cost_[j] = -1.0;
            else if (x_[j] > ub_[j] + tol)
                phase_cost_[j] = 1.0;
        }
    }

    std::vector<double> dual_values() const
    {
        std::vector<double> y(m_, 0.0);
        if (m_ == 0)
            return y;
        Eigen::VectorXd cb(m_);
        for (int p = 0; p < m_; ++p)
            cb[p] = phase_cost_[head_[p]];
        Eigen::VectorXd yy = btran(cb);
        for (int i = 0; i < m_; ++i)
            y[i] = yy[i];
        return y;
    }

    double reduced_cost(int j, const std::vector<double>& y) const
    {
        double d = phase_cost_[j];
        for_column(j, [&](int i, double v) { d -= y[i] * v; });
        return d;
    }

    /// Direction +1 if increasing x_j improves, -1 if decreasing, 0 otherwise.
    int improving_direction(int j, double d) const
    {
        const double tol = opt_.optimality_tol;
        switch (state_[j]) {
        case VarState::AtLower:
            if (lb_[j] == ub_[j])
                return 0;
            return d < -tol ? 1 : 0;
        case VarState::AtUpper:
            if (lb_[j] == ub_[j])
                return 0;
            return d > tol ? -1 : 0;
        case VarState::Free:
            return d < -tol ? 1 : (d > tol ? -1 : 0);
        case VarState::Basic:
            return 0;
        }
        return 0;
    }

    bool phase2_optimal()
    {
        set_phase_costs(false);
        std::vector<double> y = dual_values();
        for (int j = 0; j < ntot_; ++j)
            if (state_[j] != VarState::Basic && improving_direction(j, reduced_cost(j, y)) != 0)
                return false;
        return true;
    }

    SolveStatus iterate()
    {
        const double ftol = opt_.feasibility_tol;
        int since_refactor = 0;
        for (;;) {
            if (iterations_ >= max_iter_)
                return SolveStatus::IterationLimit;

            const bool infeasible = max_infeasibility() > ftol;
            set_phase_costs(infeasible);
            const std::vector<double> y = dual_values();

            // Pricing.
            int enter = -1, dir = 0;
            double best = 0.0;
            for (int j = 0; j < ntot_; ++j) {
                if (state_[j] == VarState::Basic)
                    continue;
                const double d = reduced_cost(j, y);
                const int s = improving_direction(j, d);
                if (s == 0)
                    continue;
                if (bland_) {
                    enter = j;
                    dir = s;
                    break;
                }
                if (std::abs(d) > best) {
                    best = std::abs(d);
                    enter = j;
                    dir = s;
                }
            }
            if (enter < 0)
                return infeasible ? SolveStatus::Infeasible : SolveStatus::Optimal;

            Eigen::VectorXd col = Eigen::VectorXd::Zero(m_);
            for_column(enter, [&](int i, double v) { col[i] = v; });
            const Eigen::VectorXd alpha = ftran(col);

            // Ratio test over basic variables: x_B(theta) = x_B - theta*dir*alpha.
            auto targets = [&](int j, double& lo, double& hi) {
                lo = lb_[j];
                hi = ub_[j];
                if (phase1_) {
                    if (x_[j] < lb_[j] - ftol) {
                        lo = -kInf;
                        hi = lb_[j];
                    } else if (x_[j] > ub_[j] + ftol) {
                        lo = ub_[j];
                        hi = kInf;
                    }
                }
            };
            const double flip = ub_[enter] - lb_[enter];
            int leave = -1;
            double theta = kInf;
            bool leave_at_lower = true;
            if (bland_) {
                int leave_var = -1;
                for (int p = 0; p < m_; ++p) {
                    const double a = dir * alpha[p];
                    if (std::abs(a) <= opt_.pivot_tol)
                        continue;
                    const int j = head_[p];
                    double lo, hi;
                    targets(j, lo, hi);
                    double t;
                    if (a > 0.0) {
                        if (!std::isfinite(lo))
                            continue;
                        t = std::max(0.0, (x_[j] - lo) / a);
                    } else {
                        if (!std::isfinite(hi))
                            continue;
                        t = std::max(0.0, (hi - x_[j]) / -a);
                    }
                    if (t < theta - 1e-12 || (t <= theta + 1e-12 && (leave_var < 0 || j < leave_var))) {
                        theta = t;
                        leave = p;
                        leave_var = j;
                        leave_at_lower = a > 0.0;
                    }
                }
            } else {
                // Harris two-pass: relaxed bound first, then largest pivot.
                double theta_max = kInf;
                for (int p = 0; p < m_; ++p) {
                    const double a = dir * alpha[p];
                    if (std::abs(a) <= opt_.pivot_tol)
                        continue;
                    const int j = head_[p];
                    double lo, hi;
                    targets(j, lo, hi);
                    if (a > 0.0 && std::isfinite(lo))
                        theta_max = std::min(theta_max, (x_[j] - lo + ftol) / a);
                    else if (a < 0.0 && std::isfinite(hi))
                        theta_max = std::min(theta_max, (hi + ftol - x_[j]) / -a);
                }
                double best_pivot = 0.0;
                for (int p = 0; p < m_; ++p) {
                    const double a = dir * alpha[p];
                    if (std::abs(a) <= opt_.pivot_tol)
                        continue;
                    const int j = head_[p];
                    double lo, hi;
                    targets(j, lo, hi);
                    double t;
                    if (a > 0.0) {
                        if (!std::isfinite(lo))
                            continue;
                        t = (x_[j] - lo) / a;
                    } else {
                        if (!std::isfinite(hi))
                            continue;
                        t = (hi - x_[j]) / -a;
                    }
                    if (t <= theta_max && std::abs(a) > best_pivot) {
                        best_pivot = std::abs(a);
                        theta = std::max(0.0, t);
                        leave = p;
                        leave_at_lower = a > 0.0;
                    }
                }
            }

            if (flip <= theta) {
                // Bound flip of the entering variable; basis unchanged.
                theta = flip;
                leave = -1;
            }
            if (!std::isfinite(theta))
                return phase1_ ? SolveStatus::Infeasible : SolveStatus::Unbounded;

            ++iterations_;
            if (theta <= 1e-12) {
                if (++degenerate_streak_ >= opt_.bland_after_degenerate)
                    bland_ = true;
            } else {
                degenerate_streak_ = 0;
                bland_ = false;
            }

            double leave_bound = 0.0;
            if (leave >= 0) {
                double lo, hi;
                targets(head_[leave], lo, hi);
                leave_bound = leave_at_lower ? lo : hi;
            }

            const double step = dir * theta;
            if (step != 0.0) {
                x_[enter] += step;
                for (int p = 0; p < m_; ++p)
                    if (alpha[p] != 0.0)
                        x_[head_[p]] -= step * alpha[p];
            }

            if (leave < 0) {
                x_[enter] = dir > 0 ? ub_[enter] : lb_[enter];
                state_[enter] = dir > 0 ? VarState::AtUpper : VarState::AtLower;
                continue;
            }

            const int out = head_[leave];
            const double bound = leave_bound;
            x_[out] = bound;
            if (bound == lb_[out])
                state_[out] = VarState::AtLower;
            else if (bound == ub_[out])
                state_[out] = VarState::AtUpper;
            else
                state_[out] = VarState::Free;  // cannot occur for finite-bound targets
            pos_[out] = -1;
            head_[leave] = enter;
            pos_[enter] = leave;
            state_[enter] = VarState::Basic;

            Eta eta;
            eta.pos = leave;
            eta.pivot = alpha[leave];
            for (int p = 0; p < m_; ++p)
                if (p != leave && std::abs(alpha[p]) > 1e-13)
                    eta.column.emplace_back(p, alpha[p]);
            etas_.push_back(std::move(eta));

            if (++since_refactor >= opt_.refactor_interval) {
                since_refactor = 0;
                if (!refactor()) {
                    slack_basis();
                    continue;
                }
                compute_basic_values();
            }
        }
    }
};

void scale_problem(StdProblem& p, std::vector<double>& row_scale, std::vector<double>& col_scale)
{
    row_scale.assign(p.m, 1.0);
    col_scale.assign(p.n, 1.0);
    auto pow2 = [](double v) { return std::exp2(std::round(std::log2(v))); };

    std::vector<double> rmax(p.m, 0.0);
    for (int j = 0; j < p.n; ++j)
        for (int k = p.a.start[j]; k < p.a.start[j + 1]; ++k)
            rmax[p.a.index[k]] = std::max(rmax[p.a.index[k]], std::abs(p.a.value[k]));
    for (int i = 0; i < p.m; ++i)
        if (rmax[i] > 0.0)
            row_scale[i] = pow2(1.0 / rmax[i]);
    for (int j = 0; j < p.n; ++j) {
        double cmax = 0.0;
        for (int k = p.a.start[j]; k < p.a.start[j + 1]; ++k)
            cmax = std::max(cmax, std::abs(p.a.value[k] * row_scale[p.a.index[k]]));
        if (cmax > 0.0)
            col_scale[j] = pow2(1.0 / cmax);
    }
    for (int j = 0; j < p.n; ++j) {
        for (int k = p.a.start[j]; k < p.a.start[j + 1]; ++k)
            p.a.value[k] *= row_scale[p.a.index[k]] * col_scale[j];
        p.c[j] *= col_scale[j];
        p.lo[j] /= col_scale[j];
        p.hi[j] /= col_scale[j];
    }
    for (int i = 0; i < p.m; ++i) {
        p.row_lo[i] *= row_scale[i];
        p.row_hi[i] *= row_scale[i];
    }
}

CoreResult solve_core(StdProblem p, const SimplexOptions& opt, const std::vector<std::uint8_t>* warm = nullptr)
{
    std::vector<double> rs, cs;
    if (opt.scale)
        scale_problem(p, rs, cs);
    else {
        rs.assign(p.m, 1.0);
        cs.assign(p.n, 1.0);
    }
    SimplexCore core(p.a, p, opt);
    CoreResult r = core.run(warm);
    for (int j = 0; j < p.n; ++j) {
        r.x[j] *= cs[j];
        if (!r.d.empty())
            r.d[j] /= cs[j];
    }
    for (std::size_t i = 0; i < r.y.size(); ++i)
        r.y[i] *= rs[i];
    return r;
}

}  // namespace

Solution solve_lp(const LpModel& model, const SimplexOptions& options)
{
    return solve_lp(model, model.lower(), model.upper(), options);
}

Solution solve_lp(const LpModel& model, std::span<const double> lower, std::span<const double> upper,
                  const SimplexOptions& options)
{
    return solve_lp(model, lower, upper, options, nullptr);
}

Solution solve_lp(const LpModel& model, std::span<const double> lower, std::span<const double> upper,
                  const SimplexOptions& options, Basis* basis)
{
    const auto t0 = std::chrono::steady_clock::now();
    model.validate();
    Solution sol;
    StdProblem full = make_std_problem(model, lower, upper);
    for (int j = 0; j < full.n; ++j) {
        if (full.lo[j] > full.hi[j]) {
            sol.status = SolveStatus::Infeasible;
            sol.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            return sol;
        }
    }

    Presolver pre(options.feasibility_tol);
    StdProblem reduced;
    const bool use_presolve = options.presolve && basis == nullptr;
    const bool feasible = use_presolve ? pre.run(full, reduced) : (reduced = full, true);
    if (!feasible) {
        sol.status = SolveStatus::Infeasible;
        sol.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return sol;
    }

    CoreResult core = solve_core(reduced, options, basis && !basis->status.empty() ? &basis->status : nullptr);
    if (basis && core.status == SolveStatus::Optimal)
        basis->status = std::move(core.basis);
    sol.status = core.status;
    sol.stats.iterations = core.iterations;

    std::vector<double> x, y;
    if (use_presolve)
        pre.postsolve(full, core.x, core.y, core.status == SolveStatus::Optimal, x, y);
    else {
        x = core.x;
        y = core.y;
    }
    sol.primal = std::move(x);
    sol.row_activity = model.row_activity(sol.primal);
    sol.objective = model.objective_value(sol.primal);
    if (core.status == SolveStatus::Optimal) {
        sol.row_dual = std::move(y);
        sol.reduced_cost.assign(model.costs().begin(), model.costs().end());
        for (const Triplet& t : model.triplets())
            sol.reduced_cost[t.col] -= t.value * sol.row_dual[t.row];
        sol.stats.best_bound = sol.objective;
    }
    sol.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return sol;
}

}  // namespace capexp::lp
