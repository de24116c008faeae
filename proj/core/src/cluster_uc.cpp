#include "capexp/cluster_uc.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "capexp/error.hpp"

namespace capexp {

using lp::RowSense;

double CommitmentParams::total() const
{
    return std::accumulate(nameplates.begin(), nameplates.end(), 0.0);
}

double CommitmentParams::largest() const
{
    return nameplates.empty() ? 0.0 : *std::max_element(nameplates.begin(), nameplates.end());
}

void CommitmentParams::validate() const
{
    auto bad = [&](const std::string& what) {
        throw Error(ErrorKind::InvalidParams, fmt::format("group '{}': {}", group_id, what));
    };
    for (double n : nameplates)
        if (!(n > 0.0) || !std::isfinite(n))
            bad("nameplates must be positive and finite");
    if (!(min_output_frac >= 0.0 && min_output_frac <= max_output_frac && max_output_frac <= 1.0))
        bad("need 0 <= min_output_frac <= max_output_frac <= 1");
    if (!(ramp_frac_per_h >= 0.0))
        bad("ramp_frac_per_h must be >= 0");
    if (min_up_h < 1 || min_down_h < 1)
        bad("min_up_h and min_down_h must be >= 1");
    if (!(dt_h > 0.0))
        bad("dt_h must be positive");
}

namespace {

std::vector<double> split_capacity(double existing, double unit_size)
{
    if (!(existing > 0.0))
        return {};
    const int n = std::max(1, static_cast<int>(std::lround(existing / unit_size)));
    return std::vector<double>(static_cast<size_t>(n), existing / n);
}

template <class G>
CommitmentParams common_params(const G& g)
{
    CommitmentParams p;
    p.group_id = g.group_id;
    p.nameplates = split_capacity(g.existing_capacity, g.unit_size);
    p.min_output_frac = g.min_output_frac;
    p.max_output_frac = g.max_output_frac;
    p.ramp_frac_per_h = g.ramp_frac_per_h;
    p.min_up_h = g.min_up_h;
    p.min_down_h = g.min_down_h;
    return p;
}

// Linear row under construction: variable terms plus a constant that moves
// to the right-hand side at emit time.
struct RowAcc {
    std::vector<BlockTerm> terms;
    double constant = 0.0;

    void add(int var, double coef)
    {
        auto it = std::find_if(terms.begin(), terms.end(), [&](const BlockTerm& bt) { return bt.var == var; });
        if (it != terms.end())
            it->coef += coef;
        else if (coef != 0.0)
            terms.push_back({var, coef});
    }
};

void emit(UnitCommitmentBlock& b, std::string name, std::string tag, RowAcc row, RowSense sense, double rhs)
{
    std::erase_if(row.terms, [](const BlockTerm& t) { return t.coef == 0.0; });
    if (row.terms.empty()) {
        // all-constant after substituting the initial state
        const double slack = rhs - row.constant;
        const bool ok = sense == RowSense::Le ? slack >= -1e-9
                        : sense == RowSense::Ge ? slack <= 1e-9
                                                : std::abs(slack) <= 1e-9;
        if (!ok)
            throw Error(ErrorKind::InvalidInitialState, fmt::format("initial state violates row '{}'", name));
        return;
    }
    b.add_row(std::move(name), std::move(tag), std::move(row.terms), sense, rhs - row.constant);
}

}  // namespace

CommitmentParams commitment_params(const CoalGroupParams& g)
{
    CommitmentParams p = common_params(g);
    p.energy_cost = g.fuel_cost;
    p.startup_cost = g.startup_cost;
    return p;
}

CommitmentParams commitment_params(const ChpGroupParams& g)
{
    CommitmentParams p = common_params(g);
    p.energy_cost = g.fuel_cost;
    p.startup_cost = g.startup_cost;
    return p;
}

CommitmentParams commitment_params(const CspGroupParams& g)
{
    return common_params(g);
}

std::string uc_name(std::string_view symbol, std::string_view group, int t)
{
    return fmt::format("{}[{},t={}]", symbol, group, t);
}

std::string unit_name(std::string_view symbol, std::string_view group, int unit, int t)
{
    return fmt::format("{}[{},i={},t={}]", symbol, group, unit, t);
}

UnitCommitmentBlock build_exact_uc(const CommitmentParams& params, int T, std::span<const double> p0,
                                   std::span<const int> x0, const ExactUcOptions& options)
{
    params.validate();
    const int n = static_cast<int>(params.nameplates.size());
    if (T < 1)
        throw Error(ErrorKind::InvalidParams, "T must be >= 1");
    if (static_cast<int>(x0.size()) != n)
        throw Error(ErrorKind::InvalidInitialState, fmt::format("x0 has {} entries for {} units", x0.size(), n));
    if (!p0.empty() && static_cast<int>(p0.size()) != n)
        throw Error(ErrorKind::InvalidInitialState, fmt::format("p0 has {} entries for {} units", p0.size(), n));
    if (static_cast<long>(n) * T > options.max_binaries)
        throw Error(ErrorKind::TooManyUnits,
                    fmt::format("{} units x {} hours exceeds the budget of {} binaries", n, T, options.max_binaries));

    const std::string& g = params.group_id;
    const double dt = params.dt_h;
    UnitCommitmentBlock b;

    std::vector<int> P(T + 1, -1);
    for (int t = 1; t <= T; ++t)
        P[t] = b.add_variable(uc_name(options.output_symbol, g, t), 0.0, lp::kInf, params.energy_cost * dt);

    // x[i][t], u[i][t], d[i][t], p[i][t]; index 0 is unused (initial state is constant)
    std::vector<std::vector<int>> x(n), u(n), d(n), p(n);
    for (int i = 0; i < n; ++i) {
        const double pn = params.nameplates[i];
        x[i].assign(T + 2, -1);
        u[i].assign(T + 2, -1);
        d[i].assign(T + 2, -1);
        p[i].assign(T + 1, -1);
        for (int t = 1; t <= T; ++t) {
            x[i][t] = b.add_variable(unit_name("x", g, i + 1, t), 0.0, 1.0, params.noload_cost * pn * dt, true);
            u[i][t] = b.add_variable(unit_name("u", g, i + 1, t), 0.0, 1.0, params.startup_cost * pn);
            d[i][t] = b.add_variable(unit_name("d", g, i + 1, t), 0.0, 1.0);
            p[i][t] = b.add_variable(unit_name("p", g, i + 1, t), 0.0, params.max_output_frac * pn);
        }
    }

    for (int i = 0; i < n; ++i) {
        if (x0[i] != 0 && x0[i] != 1)
            throw Error(ErrorKind::InvalidInitialState, fmt::format("x0[{}] = {} is not binary", i, x0[i]));
        const double pn = params.nameplates[i];
        const double pmin = params.min_output_frac * pn;
        const double pmax = params.max_output_frac * pn;
        const double ramp = params.ramp_frac_per_h * pn;
        const double pinit = p0.empty() ? (x0[i] ? pmin : 0.0) : p0[i];
        if (x0[i] ? (pinit < pmin - 1e-9 || pinit > pmax + 1e-9) : std::abs(pinit) > 1e-9)
            throw Error(ErrorKind::InvalidInitialState,
                        fmt::format("unit {} initial output {} inconsistent with status {}", i + 1, pinit, x0[i]));

        // Contribution of x_{i,k} to a row, substituting the constant x_{i,0}.
        auto add_x = [&](RowAcc& r, int k, double coef) {
            if (k == 0)
                r.constant += coef * x0[i];
            else
                r.add(x[i][k], coef);
        };
        auto add_p = [&](RowAcc& r, int k, double coef) {
            if (k == 0)
                r.constant += coef * pinit;
            else
                r.add(p[i][k], coef);
        };

        for (int t = 1; t <= T; ++t) {
            const auto rn = [&](const char* tag) { return unit_name(tag, g, i + 1, t); };
            {
                RowAcc r;
                add_x(r, t, 1.0);
                add_x(r, t - 1, -1.0);
                r.add(u[i][t], -1.0);
                r.add(d[i][t], 1.0);
                emit(b, rn("transition"), "transition", r, RowSense::Eq, 0.0);
            }
            {
                RowAcc r;
                r.add(u[i][t], 1.0);
                add_x(r, t, -1.0);
                emit(b, rn("start_on"), "start_logic", r, RowSense::Le, 0.0);
            }
            {
                RowAcc r;
                r.add(u[i][t], 1.0);
                add_x(r, t - 1, 1.0);
                emit(b, rn("start_off"), "start_logic", r, RowSense::Le, 1.0);
            }
            {
                RowAcc r;
                r.add(p[i][t], 1.0);
                add_x(r, t, -pmin);
                emit(b, rn("output_min"), "output_min", r, RowSense::Ge, 0.0);
            }
            {
                // a unit starting in hour t reaches at most its minimum output
                RowAcc r;
                r.add(p[i][t], 1.0);
                add_x(r, t, -pmax);
                r.add(u[i][t], pmax - pmin);
                emit(b, rn("output_max"), "output_max", r, RowSense::Le, 0.0);
            }
            {
                RowAcc r;
                add_p(r, t, 1.0);
                add_p(r, t - 1, -1.0);
                r.add(u[i][t], -pmin);
                r.add(d[i][t], pmax);
                add_x(r, t, ramp);
                r.add(u[i][t], -ramp);
                emit(b, rn("ramp_down"), "ramp_down", r, RowSense::Ge, 0.0);
            }
            {
                RowAcc r;
                add_p(r, t, 1.0);
                add_p(r, t - 1, -1.0);
                r.add(u[i][t], -pmax);
                r.add(d[i][t], pmin);
                add_x(r, t, -ramp);
                r.add(u[i][t], ramp);
                if (t < T)
                    r.add(d[i][t + 1], ramp);
                emit(b, rn("ramp_up"), "ramp_up", r, RowSense::Le, 0.0);
            }
            // Minimum up time: a unit that shuts down in hour t has been on
            // for the whole window [t - T_on, t - 1] (truncated at hour 0).
            if (params.min_up_h >= 2) {
                const int k0 = std::max(0, t - params.min_up_h);
                const double L = t - k0;
                RowAcc r;
                add_x(r, t - 1, L);
                add_x(r, t, -L);
                for (int k = k0; k <= t - 1; ++k)
                    add_x(r, k, -1.0);
                emit(b, rn("min_up"), "min_up", r, RowSense::Le, 0.0);
            }
            // Start/stop window forms of the same two rules; redundant for
            // integral x but much tighter in the LP relaxation.
            if (params.min_up_h >= 2) {
                RowAcc r;
                for (int tau = std::max(1, t - params.min_up_h + 1); tau <= t; ++tau)
                    r.add(u[i][tau], 1.0);
                add_x(r, t, -1.0);
                emit(b, rn("min_up_window"), "min_up_window", r, RowSense::Le, 0.0);
            }
            if (params.min_down_h >= 2) {
                RowAcc r;
                for (int tau = std::max(1, t - params.min_down_h + 1); tau <= t; ++tau)
                    r.add(d[i][tau], 1.0);
                add_x(r, t, 1.0);
                emit(b, rn("min_down_window"), "min_down_window", r, RowSense::Le, 1.0);
            }
            if (params.min_down_h >= 2) {
                const int k0 = std::max(0, t - params.min_down_h);
                const double L = t - k0;
                RowAcc r;
                add_x(r, t, L);
                add_x(r, t - 1, -L);
                for (int k = k0; k <= t - 1; ++k)
                    add_x(r, k, 1.0);
                emit(b, rn("min_down"), "min_down", r, RowSense::Le, L);
            }
        }
    }

    for (int t = 1; t <= T; ++t) {
        RowAcc r;
        r.add(P[t], 1.0);
        for (int i = 0; i < n; ++i)
            r.add(p[i][t], -1.0);
        emit(b, uc_name("output_sum", g, t), "output_sum", r, RowSense::Eq, 0.0);
    }
    return b;
}

UnitCommitmentBlock build_clustered_uc(const CommitmentParams& params, int T, double s0_online,
                                       const ClusteredUcOptions& options)
{
    params.validate();
    if (T < 1)
        throw Error(ErrorKind::InvalidParams, "T must be >= 1");
    const double S = params.total();
    if (!(s0_online >= -1e-9 && s0_online <= S + 1e-9 * std::max(1.0, S)))
        throw Error(ErrorKind::InvalidInitialState,
                    fmt::format("group '{}': initial online capacity {} outside [0, {}]", params.group_id, s0_online, S));
    const double amin = params.min_output_frac;
    const double amax = params.max_output_frac;
    const double R = params.ramp_frac_per_h;
    const double P0 = std::isnan(options.p0) ? amin * s0_online : options.p0;
    if (P0 < amin * s0_online - 1e-9 || P0 > amax * s0_online + 1e-9)
        throw Error(ErrorKind::InvalidInitialState,
                    fmt::format("group '{}': initial output {} outside [{}, {}]", params.group_id, P0, amin * s0_online,
                                amax * s0_online));

    const std::string& g = params.group_id;
    const double dt = params.dt_h;
    const bool sized = options.capacity_var.has_value();
    UnitCommitmentBlock b;

    // With a fixed fleet S is a constant and the capacity caps become bounds.
    const int cap = sized ? b.add_external(*options.capacity_var) : -1;
    const double ub = sized ? lp::kInf : S;
    auto add_S = [&](RowAcc& r, double coef) {
        if (sized)
            r.add(cap, coef);
        else
            r.constant += coef * S;
    };

    std::vector<int> P(T + 2, -1), O(T + 2, -1), U(T + 2, -1), D(T + 2, -1);
    for (int t = 1; t <= T; ++t) {
        const std::string pname = uc_name(options.output_symbol, g, t);
        P[t] = options.declare_output ? b.add_variable(pname, 0.0, lp::kInf, params.energy_cost * dt)
                                      : b.add_external(pname);
        O[t] = b.add_variable(uc_name("SO", g, t), 0.0, ub, params.noload_cost * dt);
        U[t] = b.add_variable(uc_name("SU", g, t), 0.0, ub, params.startup_cost);
        D[t] = b.add_variable(uc_name("SD", g, t), 0.0, ub);
    }
    auto add_O = [&](RowAcc& r, int k, double coef) {
        if (k == 0)
            r.constant += coef * s0_online;
        else
            r.add(O[k], coef);
    };
    auto add_P = [&](RowAcc& r, int k, double coef) {
        if (k == 0)
            r.constant += coef * P0;
        else
            r.add(P[k], coef);
    };

    for (int t = 1; t <= T; ++t) {
        const auto rn = [&](const char* tag) { return uc_name(tag, g, t); };
        if (sized) {
            // startup and shutdown caps are implied by the min-up/down rows
            RowAcc r;
            r.add(O[t], 1.0);
            add_S(r, -1.0);
            emit(b, rn("online_cap"), "online_cap", r, RowSense::Le, 0.0);
        }
        {
            RowAcc r;
            add_O(r, t, 1.0);
            add_O(r, t - 1, -1.0);
            r.add(U[t], -1.0);
            r.add(D[t], 1.0);
            emit(b, rn("transition"), "transition", r, RowSense::Eq, 0.0);
        }
        {
            RowAcc r;
            r.add(P[t], 1.0);
            r.add(O[t], -amin);
            emit(b, rn("output_min"), "output_min", r, RowSense::Ge, 0.0);
        }
        {
            // capacity started this hour only reaches its minimum output;
            // this row also implies P <= amax * SO
            RowAcc r;
            r.add(P[t], 1.0);
            r.add(O[t], -amax);
            r.add(U[t], amax - amin);
            emit(b, rn("output_max"), "output_max", r, RowSense::Le, 0.0);
        }
        {
            RowAcc r;
            add_P(r, t, 1.0);
            add_P(r, t - 1, -1.0);
            r.add(U[t], -amin);
            r.add(D[t], amax);
            r.add(O[t], R);
            r.add(U[t], -R);
            emit(b, rn("ramp_down"), "ramp_down", r, RowSense::Ge, 0.0);
        }
        {
            RowAcc r;
            add_P(r, t, 1.0);
            add_P(r, t - 1, -1.0);
            r.add(U[t], -amax);
            r.add(D[t], amin);
            r.add(O[t], -R);
            r.add(U[t], R);
            if (t < T)
                r.add(D[t + 1], R);
            emit(b, rn("ramp_up"), "ramp_up", r, RowSense::Le, 0.0);
        }
    }

    // Minimum up: capacity shut down in t+1 was online in t and not started
    // within the last min_up - 1 hours.
    {
        RowAcc r;
        r.add(D[1], 1.0);
        emit(b, uc_name("min_up", g, 1), "min_up", r, RowSense::Le, s0_online);
    }
    for (int t = 1; t <= T - 1; ++t) {
        RowAcc r;
        r.add(D[t + 1], 1.0);
        add_O(r, t, -1.0);
        for (int tau = std::max(1, t - params.min_up_h + 2); tau <= t; ++tau)
            r.add(U[tau], 1.0);
        emit(b, uc_name("min_up", g, t + 1), "min_up", r, RowSense::Le, 0.0);
    }
    // Minimum down, mirrored on offline capacity S - SO.
    {
        RowAcc r;
        r.add(U[1], 1.0);
        add_S(r, -1.0);
        emit(b, uc_name("min_down", g, 1), "min_down", r, RowSense::Le, -s0_online);
    }
    for (int t = 1; t <= T - 1; ++t) {
        RowAcc r;
        r.add(U[t + 1], 1.0);
        add_O(r, t, 1.0);
        for (int tau = std::max(1, t - params.min_down_h + 2); tau <= t; ++tau)
            r.add(D[tau], 1.0);
        add_S(r, -1.0);
        emit(b, uc_name("min_down", g, t + 1), "min_down", r, RowSense::Le, 0.0);
    }
    return b;
}

ClusterState aggregate_cluster_state(std::span<const UnitStatus> statuses, std::span<const double> nameplates)
{
    if (statuses.size() != nameplates.size())
        throw Error(ErrorKind::InconsistentStatuses,
                    fmt::format("{} status series for {} nameplates", statuses.size(), nameplates.size()));
    ClusterState s;
    s.group_total = std::accumulate(nameplates.begin(), nameplates.end(), 0.0);
    if (statuses.empty())
        return s;
    const size_t T = statuses.front().on.size();
    s.online_cap.assign(T, 0.0);
    s.startup_cap.assign(T, 0.0);
    s.shutdown_cap.assign(T, 0.0);
    auto binary = [](int v) { return v == 0 || v == 1; };
    for (size_t i = 0; i < statuses.size(); ++i) {
        const UnitStatus& st = statuses[i];
        if (st.on.size() != T || st.start.size() != T || st.stop.size() != T)
            throw Error(ErrorKind::InconsistentStatuses, fmt::format("unit {}: series lengths differ", i + 1));
        if (!binary(st.initial))
            throw Error(ErrorKind::InconsistentStatuses, fmt::format("unit {}: initial status not binary", i + 1));
        int prev = st.initial;
        for (size_t t = 0; t < T; ++t) {
            if (!binary(st.on[t]) || !binary(st.start[t]) || !binary(st.stop[t]))
                throw Error(ErrorKind::InconsistentStatuses,
                            fmt::format("unit {}, hour {}: status not binary", i + 1, t + 1));
            if (st.on[t] - prev != st.start[t] - st.stop[t])
                throw Error(ErrorKind::InconsistentStatuses,
                            fmt::format("unit {}, hour {}: on/off change {} but start - stop = {}", i + 1, t + 1,
                                        st.on[t] - prev, st.start[t] - st.stop[t]));
            s.online_cap[t] += st.on[t] * nameplates[i];
            s.startup_cap[t] += st.start[t] * nameplates[i];
            s.shutdown_cap[t] += st.stop[t] * nameplates[i];
            prev = st.on[t];
        }
    }
    return s;
}

namespace {

double value_of(const lp::LpModel& model, const lp::Solution& sol, const std::string& name)
{
    auto c = model.find_col(name);
    if (!c)
        throw Error(ErrorKind::UnknownColumn, fmt::format("no column '{}'", name));
    return sol.primal.at(*c);
}

}  // namespace

ClusterState read_cluster_state(const lp::LpModel& model, const lp::Solution& sol, const CommitmentParams& params,
                                int T)
{
    ClusterState s;
    s.group_total = params.total();
    for (int t = 1; t <= T; ++t) {
        s.online_cap.push_back(value_of(model, sol, uc_name("SO", params.group_id, t)));
        s.startup_cap.push_back(value_of(model, sol, uc_name("SU", params.group_id, t)));
        s.shutdown_cap.push_back(value_of(model, sol, uc_name("SD", params.group_id, t)));
    }
    return s;
}

std::vector<UnitStatus> read_unit_statuses(const lp::LpModel& model, const lp::Solution& sol,
                                           const CommitmentParams& params, int T, std::span<const int> x0)
{
    const int n = static_cast<int>(params.nameplates.size());
    std::vector<UnitStatus> out(n);
    auto rounded = [&](const char* sym, int i, int t) {
        return static_cast<int>(std::lround(value_of(model, sol, unit_name(sym, params.group_id, i, t))));
    };
    for (int i = 0; i < n; ++i) {
        out[i].initial = x0[i];
        for (int t = 1; t <= T; ++t) {
            out[i].on.push_back(rounded("x", i + 1, t));
            out[i].start.push_back(rounded("u", i + 1, t));
            out[i].stop.push_back(rounded("d", i + 1, t));
        }
    }
    return out;
}

GapReport certify_gap(const UcSolution& exact, const UcSolution& clustered, std::span<const double> nameplates)
{
    if (exact.status != lp::SolveStatus::Optimal)
        throw Error(ErrorKind::NotOptimal, "exact solution is not optimal");
    if (clustered.status != lp::SolveStatus::Optimal)
        throw Error(ErrorKind::NotOptimal, "clustered solution is not optimal");
    const auto& a = exact.state.online_cap;
    const auto& b = clustered.state.online_cap;
    if (a.size() != b.size())
        throw Error(ErrorKind::InconsistentStatuses,
                    fmt::format("online series lengths differ ({} vs {})", a.size(), b.size()));
    GapReport r;
    for (size_t t = 0; t < a.size(); ++t) {
        const double dev = std::abs(a[t] - b[t]);
        if (dev > r.max_online_deviation) {
            r.max_online_deviation = dev;
            r.worst_hour = static_cast<int>(t) + 1;
        }
    }
    r.largest_nameplate = nameplates.empty() ? 0.0 : *std::max_element(nameplates.begin(), nameplates.end());
    r.within_bound = r.max_online_deviation <= r.largest_nameplate + 1e-6;
    r.objective_gap = exact.objective - clustered.objective;
    r.relative_objective_gap = r.objective_gap / std::max(1.0, std::abs(exact.objective));
    return r;
}

}  // namespace capexp
