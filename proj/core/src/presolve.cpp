#include "presolve.hpp"

#include <algorithm>
#include <cmath>

namespace capexp::lp {

StdProblem make_std_problem(const LpModel& model, std::span<const double> lower,
                            std::span<const double> upper)
{
    StdProblem p;
    p.m = model.num_rows();
    p.n = model.num_cols();
    p.a = model.column_matrix();
    p.c = model.costs();
    p.lo.assign(lower.begin(), lower.end());
    p.hi.assign(upper.begin(), upper.end());
    p.row_lo.resize(p.m);
    p.row_hi.resize(p.m);
    for (int i = 0; i < p.m; ++i) {
        const double b = model.row_rhs(i);
        switch (model.row_sense(i)) {
        case RowSense::Le: p.row_lo[i] = -kInf; p.row_hi[i] = b; break;
        case RowSense::Ge: p.row_lo[i] = b; p.row_hi[i] = kInf; break;
        case RowSense::Eq: p.row_lo[i] = b; p.row_hi[i] = b; break;
        }
    }
    p.obj_const = model.objective_constant();
    return p;
}

namespace {

bool crosses(double lo, double hi, double tol)
{
    return lo > hi + tol * std::max(1.0, std::min(std::abs(lo), std::abs(hi)));
}

}  // namespace

bool Presolver::run(const StdProblem& full, StdProblem& reduced)
{
    ops_.clear();
    const int m = full.m, n = full.n;
    std::vector<double> lo = full.lo, hi = full.hi, rlo = full.row_lo, rhi = full.row_hi;
    std::vector<char> col_on(n, 1), row_on(m, 1);

    // Row-wise copy for singleton lookups.
    std::vector<int> rstart(m + 1, 0), rcol;
    std::vector<double> rval;
    for (int k = 0; k < static_cast<int>(full.a.index.size()); ++k)
        ++rstart[full.a.index[k] + 1];
    for (int i = 0; i < m; ++i)
        rstart[i + 1] += rstart[i];
    rcol.resize(full.a.index.size());
    rval.resize(full.a.index.size());
    {
        std::vector<int> fill(rstart.begin(), rstart.end() - 1);
        for (int j = 0; j < n; ++j)
            for (int k = full.a.start[j]; k < full.a.start[j + 1]; ++k) {
                const int i = full.a.index[k];
                rcol[fill[i]] = j;
                rval[fill[i]++] = full.a.value[k];
            }
    }
    std::vector<int> count(m);
    for (int i = 0; i < m; ++i)
        count[i] = rstart[i + 1] - rstart[i];

    bool changed = true;
    while (changed) {
        changed = false;
        for (int j = 0; j < n; ++j) {
            if (!col_on[j] || lo[j] != hi[j])
                continue;
            const double v = lo[j];
            for (int k = full.a.start[j]; k < full.a.start[j + 1]; ++k) {
                const int i = full.a.index[k];
                if (!row_on[i])
                    continue;
                rlo[i] -= full.a.value[k] * v;
                rhi[i] -= full.a.value[k] * v;
                --count[i];
            }
            col_on[j] = 0;
            Op op{OpKind::FixedCol};
            op.col = j;
            op.value = v;
            ops_.push_back(op);
            changed = true;
        }
        for (int i = 0; i < m; ++i) {
            if (!row_on[i] || count[i] > 1)
                continue;
            if (count[i] == 0) {
                if (crosses(rlo[i], 0.0, tol_) || crosses(0.0, rhi[i], tol_))
                    return false;
                row_on[i] = 0;
                Op op{OpKind::EmptyRow};
                op.row = i;
                ops_.push_back(op);
                changed = true;
                continue;
            }
            int j = -1;
            double a = 0.0;
            for (int k = rstart[i]; k < rstart[i + 1]; ++k)
                if (col_on[rcol[k]]) {
                    j = rcol[k];
                    a = rval[k];
                    break;
                }
            double blo = a > 0.0 ? rlo[i] / a : rhi[i] / a;
            double bhi = a > 0.0 ? rhi[i] / a : rlo[i] / a;
            Op op{OpKind::SingletonRow};
            op.row = i;
            op.col = j;
            op.coef = a;
            op.lo_row = blo;
            op.hi_row = bhi;
            if (blo > lo[j]) {
                lo[j] = blo;
                op.tightened_lo = true;
            }
            if (bhi < hi[j]) {
                hi[j] = bhi;
                op.tightened_hi = true;
            }
            if (lo[j] > hi[j]) {
                if (crosses(lo[j], hi[j], tol_))
                    return false;
                if (op.tightened_lo && !op.tightened_hi)
                    lo[j] = hi[j];
                else
                    hi[j] = lo[j];
            }
            row_on[i] = 0;
            count[i] = 0;
            ops_.push_back(op);
            changed = true;
        }
    }

    kept_cols_.clear();
    kept_rows_.clear();
    std::vector<int> new_row(m, -1);
    for (int i = 0; i < m; ++i)
        if (row_on[i]) {
            new_row[i] = static_cast<int>(kept_rows_.size());
            kept_rows_.push_back(i);
        }
    for (int j = 0; j < n; ++j)
        if (col_on[j])
            kept_cols_.push_back(j);

    reduced = StdProblem{};
    reduced.m = static_cast<int>(kept_rows_.size());
    reduced.n = static_cast<int>(kept_cols_.size());
    reduced.a.rows = reduced.m;
    reduced.a.cols = reduced.n;
    reduced.a.start.assign(reduced.n + 1, 0);
    for (int jj = 0; jj < reduced.n; ++jj) {
        const int j = kept_cols_[jj];
        for (int k = full.a.start[j]; k < full.a.start[j + 1]; ++k) {
            const int i = new_row[full.a.index[k]];
            if (i < 0)
                continue;
            reduced.a.index.push_back(i);
            reduced.a.value.push_back(full.a.value[k]);
        }
        reduced.a.start[jj + 1] = static_cast<int>(reduced.a.index.size());
        reduced.c.push_back(full.c[j]);
        reduced.lo.push_back(lo[j]);
        reduced.hi.push_back(hi[j]);
    }
    for (int i : kept_rows_) {
        reduced.row_lo.push_back(rlo[i]);
        reduced.row_hi.push_back(rhi[i]);
    }
    return true;
}

void Presolver::postsolve(const StdProblem& full, const std::vector<double>& xr,
                          const std::vector<double>& yr, bool with_duals, std::vector<double>& x,
                          std::vector<double>& y) const
{
    x.assign(full.n, 0.0);
    y.assign(full.m, 0.0);
    for (std::size_t k = 0; k < kept_cols_.size(); ++k)
        x[kept_cols_[k]] = xr[k];
    if (with_duals)
        for (std::size_t k = 0; k < kept_rows_.size() && k < yr.size(); ++k)
            y[kept_rows_[k]] = yr[k];
    for (const Op& op : ops_)
        if (op.kind == OpKind::FixedCol)
            x[op.col] = op.value;
    if (!with_duals)
        return;

    auto column_reduced_cost = [&](int j) {
        double d = full.c[j];
        for (int k = full.a.start[j]; k < full.a.start[j + 1]; ++k)
            d -= full.a.value[k] * y[full.a.index[k]];
        return d;
    };
    for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) {
        if (it->kind != OpKind::SingletonRow)
            continue;
        const int j = it->col;
        const double d = column_reduced_cost(j);
        auto at = [&](double b) { return std::abs(x[j] - b) <= 1e-6 * std::max(1.0, std::abs(b)); };
        if ((d > 0.0 && it->tightened_lo && at(it->lo_row)) ||
            (d < 0.0 && it->tightened_hi && at(it->hi_row)))
            y[it->row] = d / it->coef;
    }
}

}  // namespace capexp::lp
