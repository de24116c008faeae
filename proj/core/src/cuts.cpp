#include "cuts.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

namespace capexp::lp {

namespace {

constexpr std::uint8_t kBasic = 0, kAtLower = 1, kAtUpper = 2;

double frac(double v)
{
    return v - std::floor(v);
}

bool integral(double v)
{
    return std::isfinite(v) && v == std::round(v);
}

}  // namespace

std::vector<Cut> gomory_cuts(const LpModel& model, std::span<const double> lower, std::span<const double> upper,
                             const Basis& basis, std::span<const double> x, double min_frac, int max_cuts)
{
    const int n = model.num_cols();
    const int m = model.num_rows();
    std::vector<Cut> cuts;
    if (static_cast<int>(basis.status.size()) != n + m || m == 0)
        return cuts;

    const CscMatrix a = model.column_matrix();
    // row-wise copy for expanding logicals back into structurals
    std::vector<std::vector<Term>> rows(m);
    for (int j = 0; j < n; ++j)
        for (int k = a.start[j]; k < a.start[j + 1]; ++k)
            rows[a.index[k]].push_back({j, a.value[k]});

    std::vector<double> lo(n + m), hi(n + m);
    for (int j = 0; j < n; ++j) {
        lo[j] = lower[j];
        hi[j] = upper[j];
    }
    for (int i = 0; i < m; ++i) {
        const double b = model.row_rhs(i);
        switch (model.row_sense(i)) {
        case RowSense::Le: lo[n + i] = -kInf; hi[n + i] = b; break;
        case RowSense::Ge: lo[n + i] = b; hi[n + i] = kInf; break;
        case RowSense::Eq: lo[n + i] = hi[n + i] = b; break;
        }
    }

    std::vector<int> head;
    std::vector<Eigen::Triplet<double>> trips;
    for (int j = 0; j < n + m; ++j) {
        if (basis.status[j] != kBasic)
            continue;
        const int p = static_cast<int>(head.size());
        head.push_back(j);
        if (j < n) {
            for (int k = a.start[j]; k < a.start[j + 1]; ++k)
                trips.emplace_back(a.index[k], p, a.value[k]);
        } else {
            trips.emplace_back(j - n, p, -1.0);
        }
    }
    if (static_cast<int>(head.size()) != m)
        return cuts;
    Eigen::SparseMatrix<double> bmat(m, m);
    bmat.setFromTriplets(trips.begin(), trips.end());
    bmat.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(bmat);
    if (lu.info() != Eigen::Success)
        return cuts;

    // Value of each nonbasic variable at its bound.
    auto nb_value = [&](int j) {
        return basis.status[j] == kAtUpper ? hi[j] : basis.status[j] == kAtLower ? lo[j] : 0.0;
    };

    struct Cand {
        int pos;
        double dist;
    };
    std::vector<Cand> cand;
    for (int p = 0; p < m; ++p) {
        const int k = head[p];
        if (k >= n || !model.is_binary(k))
            continue;
        const double f = frac(x[k]);
        const double d = std::min(f, 1.0 - f);
        if (d >= min_frac)
            cand.push_back({p, d});
    }
    std::sort(cand.begin(), cand.end(), [](const Cand& l, const Cand& r) { return l.dist > r.dist; });
    if (static_cast<int>(cand.size()) > max_cuts)
        cand.resize(max_cuts);

    std::vector<double> alpha(n + m), g(n);
    for (const Cand& c : cand) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
        e[c.pos] = 1.0;
        const Eigen::VectorXd y = lu.transpose().solve(e);
        if (!y.allFinite())
            continue;

        // Tableau row: z_k + sum_N alpha_j z_j = 0 over [A -I] z = 0.
        bool usable = true;
        double beta = 0.0;
        for (int j = 0; j < n + m; ++j) {
            alpha[j] = 0.0;
            if (basis.status[j] == kBasic)
                continue;
            double v = 0.0;
            if (j < n) {
                for (int k = a.start[j]; k < a.start[j + 1]; ++k)
                    v += y[a.index[k]] * a.value[k];
            } else {
                v = -y[j - n];
            }
            if (std::abs(v) < 1e-13)
                v = 0.0;
            alpha[j] = v;
            if (v == 0.0 || lo[j] == hi[j]) {
                beta -= v * (lo[j] == hi[j] ? lo[j] : 0.0);
                continue;
            }
            if (basis.status[j] != kAtLower && basis.status[j] != kAtUpper) {
                usable = false;  // free nonbasic column
                break;
            }
            beta -= v * nb_value(j);
        }
        const int k = head[c.pos];
        if (!usable || !std::isfinite(beta) || std::abs(beta - x[k]) > 1e-6 * std::max(1.0, std::abs(beta)))
            continue;
        const double f0 = frac(beta);
        if (f0 < min_frac || f0 > 1.0 - min_frac)
            continue;

        // GMI in the space of distances from the active bounds, then mapped
        // back: sum c_j s_j >= 1 with s_j = z_j - l_j or u_j - z_j.
        std::fill(g.begin(), g.end(), 0.0);
        double rhs = 1.0;
        for (int j = 0; j < n + m && usable; ++j) {
            if (basis.status[j] == kBasic || alpha[j] == 0.0 || lo[j] == hi[j])
                continue;
            const bool at_upper = basis.status[j] == kAtUpper;
            const double ap = at_upper ? -alpha[j] : alpha[j];
            const bool int_col = j < n && model.is_binary(j) && integral(lo[j]) && integral(hi[j]);
            double coef;
            if (int_col) {
                const double fj = frac(ap);
                coef = fj <= f0 ? fj / f0 : (1.0 - fj) / (1.0 - f0);
            } else {
                coef = ap >= 0.0 ? ap / f0 : -ap / (1.0 - f0);
            }
            if (coef == 0.0)
                continue;
            const double sign = at_upper ? -1.0 : 1.0;
            const double bound = at_upper ? hi[j] : lo[j];
            rhs += sign * coef * bound;
            if (j < n) {
                g[j] += sign * coef;
            } else {
                for (const Term& t : rows[j - n])
                    g[t.col] += sign * coef * t.coef;
            }
        }
        if (!usable)
            continue;

        // Clean tiny coefficients by relaxing the right-hand side with the
        // column's worst-case contribution; bail out when it is unbounded.
        double gmax = 0.0;
        for (double v : g)
            gmax = std::max(gmax, std::abs(v));
        if (!(gmax > 0.0) || !std::isfinite(gmax) || !std::isfinite(rhs))
            continue;
        Cut cut;
        double gmin = kInf;
        for (int j = 0; j < n && usable; ++j) {
            const double v = g[j];
            if (v == 0.0)
                continue;
            if (std::abs(v) < 1e-9 * gmax) {
                const double worst = v > 0.0 ? v * upper[j] : v * lower[j];
                if (!std::isfinite(worst))
                    usable = false;
                else
                    rhs -= worst;
                continue;
            }
            gmin = std::min(gmin, std::abs(v));
            cut.terms.push_back({j, v});
        }
        if (!usable || cut.terms.empty() || gmax / gmin > 1e8)
            continue;
        double act = 0.0, norm = 0.0;
        for (Term& t : cut.terms) {
            t.coef /= gmax;
            act += t.coef * x[t.col];
            norm += t.coef * t.coef;
        }
        cut.rhs = rhs / gmax;
        cut.violation = (cut.rhs - act) / std::sqrt(norm);
        if (cut.violation > 1e-6)
            cuts.push_back(std::move(cut));
    }
    std::sort(cuts.begin(), cuts.end(), [](const Cut& l, const Cut& r) { return l.violation > r.violation; });
    return cuts;
}

}  // namespace capexp::lp
