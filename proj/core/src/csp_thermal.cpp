#include "capexp/csp_thermal.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "capexp/cluster_uc.hpp"
#include "capexp/error.hpp"

namespace capexp {

using lp::RowSense;

double sf_thermal_input(double s_sf_m2, double dni_kw_m2, double eta_sf)
{
    return eta_sf * s_sf_m2 * dni_kw_m2 * 1e-3;
}

double step_tes_soc(double prev, double cha, double dis, double gamma, double dt)
{
    return (1.0 - gamma * dt) * prev + (cha - dis) * dt;
}

double emergency_reserve(double p_csp, double cap_csp, double shortfall)
{
    if (!(p_csp >= 0.0) || !(cap_csp >= 0.0) || !(shortfall >= 0.0))
        throw Error(ErrorKind::InvalidState,
                    fmt::format("emergency_reserve: negative input (p={}, cap={}, shortfall={})", p_csp, cap_csp,
                                shortfall));
    if (p_csp > cap_csp)
        throw Error(ErrorKind::InvalidState, fmt::format("emergency_reserve: output {} above capacity {}", p_csp, cap_csp));
    return std::min(cap_csp - p_csp, shortfall);
}

double solar_field_area(const CspGroupParams& params, double capacity_mw)
{
    // rated PB thermal input (MW-th) times the solar multiple, in kW over design capture per m^2
    const double design_th = params.solar_multiple * capacity_mw / params.eta_pb;
    return design_th * 1e3 / (params.eta_sf * params.dni_design);
}

double tes_capacity(const CspGroupParams& params, double capacity_mw)
{
    return params.storage_hours * capacity_mw / params.eta_pb;
}

namespace {

// Capacity either as an external column or folded into the right-hand side.
struct Capacity {
    int var = -1;
    double value = 0.0;

    void add(std::vector<BlockTerm>& terms, double& rhs, double coef) const
    {
        if (coef == 0.0)
            return;
        if (var >= 0)
            terms.push_back({var, coef});
        else
            rhs -= coef * value;
    }
};

}  // namespace

UnitCommitmentBlock build_csp_flow_block(const CspGroupParams& params, int T, const TimeSeriesBundle& bundle,
                                         const CspFlowOptions& options)
{
    params.validate();
    if (T < 1)
        throw Error(ErrorKind::InvalidParams, "T must be >= 1");
    if (!bundle.has_csp)
        throw Error(ErrorKind::MissingSeries, fmt::format("CSP group '{}' needs cf_csp and dni series", params.group_id));
    if (static_cast<int>(bundle.dni.size()) < T)
        throw Error(ErrorKind::MissingSeries,
                    fmt::format("dni series has {} hours, model needs {}", bundle.dni.size(), T));

    const std::string& g = params.group_id;
    const double dt = bundle.dt_hours;
    UnitCommitmentBlock b;
    Capacity cap;
    if (options.capacity_var)
        cap.var = b.add_external(*options.capacity_var);
    else
        cap.value = params.existing_capacity;
    const bool sized = cap.var >= 0;

    // Per-MW coefficients of the capacity-proportional limits.
    const double qmax_per_mw = tes_capacity(params, 1.0);
    const double qmin_per_mw = params.soc_min_frac * qmax_per_mw;
    const double sf_per_mw_per_dni = params.solar_multiple / (params.eta_pb * params.dni_design);

    const double rating = params.tes_power_rating;
    double big_m = options.big_m;
    if (options.strict_complementarity && std::isnan(big_m)) {
        if (std::isfinite(rating)) {
            big_m = rating;
        } else {
            // with one direction switched off, one hour moves at most a full store
            const double cap_hi = sized ? params.existing_capacity + params.max_build : params.existing_capacity;
            big_m = tes_capacity(params, cap_hi) / dt;
        }
        if (!std::isfinite(big_m))
            throw Error(ErrorKind::InvalidParams,
                        fmt::format("CSP group '{}': strict mode needs a finite TES rating or max_build", g));
    }

    auto col = [&](const char* sym, int t, double lo = 0.0, double hi = lp::kInf) {
        return b.add_variable(uc_name(sym, g, t), lo, hi);
    };
    const double soc_lo = sized ? 0.0 : qmin_per_mw * cap.value;
    const double soc_hi = sized ? lp::kInf : qmax_per_mw * cap.value;
    std::vector<int> soc(T + 1);
    soc[0] = col("soc", 0, soc_lo, soc_hi);

    auto soc_limits = [&](int t) {
        if (!sized)
            return;
        double rhs = 0.0;
        std::vector<BlockTerm> hi{{soc[t], 1.0}};
        cap.add(hi, rhs, -qmax_per_mw);
        b.add_row(uc_name("soc_max", g, t), "soc_max", std::move(hi), RowSense::Le, rhs);
        if (qmin_per_mw > 0.0) {
            double lo_rhs = 0.0;
            std::vector<BlockTerm> lo{{soc[t], 1.0}};
            cap.add(lo, lo_rhs, -qmin_per_mw);
            b.add_row(uc_name("soc_min", g, t), "soc_min", std::move(lo), RowSense::Ge, lo_rhs);
        }
    };
    soc_limits(0);

    for (int t = 1; t <= T; ++t) {
        const int sf = col("q_sf_htf", t);
        const int tes_htf = col("q_tes_htf", t);
        const int htf_tes = col("q_htf_tes", t);
        const int htf_pb = col("q_htf_pb", t);
        const int cur = col("q_cur", t);
        soc[t] = col("soc", t, soc_lo, soc_hi);
        const int cha = col("q_cha", t, 0.0, rating);
        const int dis = col("q_dis", t, 0.0, rating);
        const int hd = col("q_tes_hd", t);
        const int chp = options.chp_charge ? col("q_chp_to_tes", t) : -1;
        const int eb = options.eb_charge ? col("q_eb_to_tes", t) : -1;
        const int p = b.add_external(uc_name(options.output_symbol, g, t));
        const auto rn = [&](const char* tag) { return uc_name(tag, g, t); };

        b.add_row(rn("htf_node"), "htf_node", {{sf, 1.0}, {tes_htf, 1.0}, {htf_tes, -1.0}, {htf_pb, -1.0}},
                  RowSense::Eq, 0.0);
        {
            // capture minus spillage; the field scales with the capacity
            double rhs = 0.0;
            std::vector<BlockTerm> terms{{sf, 1.0}, {cur, 1.0}};
            cap.add(terms, rhs, -sf_per_mw_per_dni * bundle.dni[t - 1]);
            b.add_row(rn("sf_capture"), "sf_capture", std::move(terms), RowSense::Eq, rhs);
        }
        b.add_row(rn("soc_balance"), "soc_balance",
                  {{soc[t], 1.0}, {soc[t - 1], -(1.0 - params.tes_loss_frac_per_h * dt)}, {cha, -dt}, {dis, dt}},
                  RowSense::Eq, 0.0);
        {
            std::vector<BlockTerm> terms{{cha, 1.0}, {htf_tes, -params.eta_tes_cha}};
            if (chp >= 0)
                terms.push_back({chp, -params.eta_tes_cha});
            if (eb >= 0)
                terms.push_back({eb, -params.eta_tes_cha});
            b.add_row(rn("tes_charge"), "tes_charge", std::move(terms), RowSense::Eq, 0.0);
        }
        b.add_row(rn("tes_discharge"), "tes_discharge",
                  {{dis, 1.0}, {tes_htf, -1.0 / params.eta_tes_dis}, {hd, -1.0 / params.eta_tes_dis}}, RowSense::Eq,
                  0.0);
        b.add_row(rn("pb_coupling"), "pb_coupling", {{htf_pb, 1.0}, {p, -1.0 / params.eta_pb}}, RowSense::Eq, 0.0);
        soc_limits(t);

        if (options.strict_complementarity) {
            const int z = b.add_variable(uc_name("z_cha", g, t), 0.0, 1.0, 0.0, true);
            b.add_row(rn("cha_switch"), "complementarity", {{cha, 1.0}, {z, -big_m}}, RowSense::Le, 0.0);
            b.add_row(rn("dis_switch"), "complementarity", {{dis, 1.0}, {z, big_m}}, RowSense::Le, big_m);
        }
    }
    b.add_row(uc_name("soc_cycle", g, T), "soc_cycle", {{soc[T], 1.0}, {soc[0], -1.0}}, RowSense::Eq, 0.0);
    return b;
}

CspFlowVars read_csp_flows(const lp::LpModel& model, const lp::Solution& sol, const std::string& group, int T)
{
    auto value = [&](const char* sym, int t, bool required) {
        const auto j = model.find_col(uc_name(sym, group, t));
        if (!j) {
            if (required)
                throw Error(ErrorKind::UnknownColumn, uc_name(sym, group, t));
            return 0.0;
        }
        return sol.primal.at(static_cast<size_t>(*j));
    };
    CspFlowVars f;
    f.soc.push_back(value("soc", 0, true));
    for (int t = 1; t <= T; ++t) {
        f.q_sf_htf.push_back(value("q_sf_htf", t, true));
        f.q_tes_htf.push_back(value("q_tes_htf", t, true));
        f.q_htf_tes.push_back(value("q_htf_tes", t, true));
        f.q_htf_pb.push_back(value("q_htf_pb", t, true));
        f.q_cur.push_back(value("q_cur", t, true));
        f.soc.push_back(value("soc", t, true));
        f.q_cha.push_back(value("q_cha", t, true));
        f.q_dis.push_back(value("q_dis", t, true));
        f.q_tes_hd.push_back(value("q_tes_hd", t, true));
        f.q_chp_to_tes.push_back(value("q_chp_to_tes", t, false));
        f.q_eb_to_tes.push_back(value("q_eb_to_tes", t, false));
    }
    return f;
}

std::vector<int> complementarity_violations(const CspFlowVars& flows, double tol)
{
    std::vector<int> hours;
    for (size_t t = 0; t < flows.q_cha.size(); ++t)
        if (std::min(flows.q_cha[t], flows.q_dis[t]) > tol)
            hours.push_back(static_cast<int>(t) + 1);
    return hours;
}

CspBalanceCheck check_csp_balances(const CspFlowVars& flows, const CspGroupParams& params, double dt)
{
    CspBalanceCheck c;
    double replay = flows.soc.at(0);
    for (size_t t = 0; t < flows.q_cha.size(); ++t) {
        const double in = flows.q_sf_htf[t] + flows.q_tes_htf[t];
        const double out = flows.q_htf_tes[t] + flows.q_htf_pb[t];
        c.htf_residual = std::max(c.htf_residual, std::abs(in - out) / std::max({1.0, in, out}));

        replay = step_tes_soc(replay, flows.q_cha[t], flows.q_dis[t], params.tes_loss_frac_per_h, dt);
        const double s = flows.soc.at(t + 1);
        c.soc_residual = std::max(c.soc_residual, std::abs(replay - s) / std::max({1.0, std::abs(s), std::abs(replay)}));
    }
    c.periodicity_gap = std::abs(flows.soc.back() - flows.soc.front());
    return c;
}

}  // namespace capexp
