#include "capexp/expansion_model.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "capexp/error.hpp"

namespace capexp {

using lp::RowSense;
using lp::Term;

std::string_view to_string(Tech tech)
{
    switch (tech) {
    case Tech::Coal: return "coal";
    case Tech::Wind: return "wind";
    case Tech::Pv: return "pv";
    case Tech::Chp: return "chp";
    case Tech::Csp: return "csp";
    case Tech::Eb: return "eb";
    }
    return "?";
}

std::optional<Tech> parse_tech(std::string_view name)
{
    for (Tech t : kAllTechs)
        if (to_string(t) == name)
            return t;
    return std::nullopt;
}

TechSet::TechSet(std::initializer_list<Tech> techs)
{
    for (Tech t : techs)
        add(t);
}

std::vector<Tech> TechSet::list() const
{
    std::vector<Tech> out;
    for (Tech t : kAllTechs)
        if (has(t))
            out.push_back(t);
    return out;
}

void ScenarioSpec::validate() const
{
    auto bad = [&](const std::string& what) {
        throw Error(ErrorKind::InvalidParams, fmt::format("scenario '{}': {}", scenario_id, what));
    };
    if (enabled_techs.empty())
        bad("no technology enabled");
    if (!std::isnan(rps_fraction) && !(rps_fraction >= 0.0 && rps_fraction <= 1.0))
        bad("rps_fraction must lie in [0,1]");
    if (horizon < 0)
        bad("horizon must be >= 0");
    if (!(initial_online_frac >= 0.0 && initial_online_frac <= 1.0))
        bad("initial_online_frac must lie in [0,1]");
}

int ExpansionModel::column(const std::string& name) const
{
    const auto j = lp.find_col(name);
    if (!j)
        throw Error(ErrorKind::UnknownColumn, name);
    return *j;
}

double capacity_cost_scale(int T, double dt_h)
{
    return T * dt_h / 8760.0;
}

namespace {

std::string inv_name(std::string_view sym, std::string_view group)
{
    return fmt::format("{}[{}]", sym, group);
}

std::string_view symbol_of(const std::string& name)
{
    return std::string_view(name).substr(0, name.find('['));
}

// Owned variables grouped by symbol (first appearance), hour order kept.
UnitCommitmentBlock ordered_by_symbol(const UnitCommitmentBlock& in)
{
    const auto& vars = in.variables();
    std::unordered_map<std::string_view, int> rank;
    for (const auto& v : vars)
        rank.try_emplace(symbol_of(v.name), static_cast<int>(rank.size()));
    std::vector<int> idx(vars.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return rank[symbol_of(vars[a].name)] < rank[symbol_of(vars[b].name)]; });

    UnitCommitmentBlock out;
    std::vector<int> remap(vars.size());
    for (int i : idx) {
        const auto& v = vars[i];
        remap[i] = v.external ? out.add_external(v.name) : out.add_variable(v.name, v.lower, v.upper, v.cost, v.binary);
    }
    for (const auto& r : in.rows()) {
        std::vector<BlockTerm> terms = r.terms;
        for (auto& t : terms)
            t.var = remap[t.var];
        out.add_row(r.name, r.tag, std::move(terms), r.sense, r.rhs);
    }
    return out;
}

void merge_ordered(lp::LpModel& m, const UnitCommitmentBlock& b)
{
    merge_block(m, ordered_by_symbol(b));
}

struct Builder {
    ExpansionModel& em;
    lp::LpModel& m;
    const TechSet techs;
    const int T;
    const double dt;

    bool on(Tech t) const { return techs.has(t); }
    int col(const std::string& name) const { return em.column(name); }

    // build column (annualized capex) and total-capacity column (fixed O&M)
    // tied by total - build = existing
    int add_capacity(std::string_view group, double existing, double max_build, double capex, double fom)
    {
        const double s = em.capacity_scale;
        const int build = m.add_column(inv_name("build", group), 0.0, max_build, s * capex);
        const int cap = m.add_column(inv_name("cap", group), existing, lp::kInf, s * fom);
        const Term terms[] = {{cap, 1.0}, {build, -1.0}};
        m.add_row(inv_name("cap_link", group), terms, RowSense::Eq, existing);
        return cap;
    }

    template <class G>
    void add_thermal_uc(const G& g, const std::string& output_symbol, double energy_cost)
    {
        CommitmentParams cp = commitment_params(g);
        cp.dt_h = dt;
        cp.energy_cost = energy_cost;
        ClusteredUcOptions opts;
        opts.capacity_var = inv_name("cap", g.group_id);
        opts.output_symbol = output_symbol;
        merge_ordered(m, build_clustered_uc(cp, T, em.spec.initial_online_frac * cp.total(), opts));
    }

    void coal()
    {
        for (const auto& g : em.library.coal) {
            add_capacity(g.group_id, g.existing_capacity, g.max_build, g.capex_annualized, g.fixed_om);
            add_thermal_uc(g, "P_coal", g.fuel_cost);
        }
    }

    void vre(const VreParams& v, std::string_view group, const std::vector<double>& cf, const char* sym)
    {
        const double cc = em.library.policy.curtail_penalty;
        const int cap = add_capacity(group, v.existing_capacity, v.max_build, v.capex_annualized, v.fixed_om);
        // curtailment c_c (cf·cap - P) moves onto the capacity and dispatch columns
        m.add_cost(cap, cc * dt * std::accumulate(cf.begin(), cf.begin() + T, 0.0));
        for (int t = 1; t <= T; ++t) {
            const int p = m.add_column(fmt::format("{}[t={}]", sym, t), 0.0, lp::kInf, -cc * dt);
            const Term terms[] = {{p, 1.0}, {cap, -cf[t - 1]}};
            m.add_row(fmt::format("{}_avail[t={}]", group, t), terms, RowSense::Le, 0.0);
        }
    }

    void chp()
    {
        for (const auto& h : em.library.chp) {
            add_capacity(h.group_id, h.existing_capacity, h.max_build, h.capex_annualized, h.fixed_om);
            // the commitment rows act on the equivalent output E = P + c_v Q
            add_thermal_uc(h, "E_chp", h.fuel_cost);

            UnitCommitmentBlock b;
            const std::string& g = h.group_id;
            const double qmax = h.heat_max / h.p_max, qmin = h.heat_min / h.p_max, pmin = h.p_min / h.p_max;
            for (int t = 1; t <= T; ++t) {
                const int p = b.add_variable(uc_name("P_chp", g, t), 0.0, lp::kInf);
                const int q = b.add_variable(uc_name("Q_chp", g, t), 0.0, lp::kInf);
                const int qc = b.add_variable(uc_name("Q_chp_cur", g, t), 0.0, lp::kInf);
                const int e = b.add_external(uc_name("E_chp", g, t));
                const int so = b.add_external(uc_name("SO", g, t));
                const auto rn = [&](const char* tag) { return uc_name(tag, g, t); };
                b.add_row(rn("chp_equiv"), "chp_equiv", {{e, 1.0}, {p, -1.0}, {q, -h.c_v}}, RowSense::Eq, 0.0);
                b.add_row(rn("chp_heat_max"), "chp_heat_max", {{q, 1.0}, {so, -qmax}}, RowSense::Le, 0.0);
                if (qmin > 0.0)
                    b.add_row(rn("chp_heat_min"), "chp_heat_min", {{q, 1.0}, {so, -qmin}}, RowSense::Ge, 0.0);
                // back-pressure edge and minimum-fuel edge of the operating polygon
                b.add_row(rn("chp_lower_bp"), "chp_lower_bp",
                          {{p, 1.0}, {q, -h.c_m}, {so, (h.c_m + h.c_v) * qmax - 1.0}}, RowSense::Ge, 0.0);
                b.add_row(rn("chp_lower_min"), "chp_lower_min", {{p, 1.0}, {q, h.c_v}, {so, -pmin}}, RowSense::Ge,
                          0.0);
                b.add_row(rn("chp_upper"), "chp_upper", {{p, 1.0}, {q, h.c_v}, {so, -1.0}}, RowSense::Le, 0.0);
                b.add_row(rn("chp_heat_cur"), "chp_heat_cur", {{qc, 1.0}, {q, -1.0}}, RowSense::Le, 0.0);
            }
            merge_ordered(m, b);
        }
    }

    void csp()
    {
        for (const auto& c : em.library.csp) {
            const int cap = add_capacity(c.group_id, c.existing_capacity, c.max_build, c.capex_annualized, c.fixed_om);
            add_thermal_uc(c, "P_csp", 0.0);
            CspFlowOptions opts;
            opts.capacity_var = inv_name("cap", c.group_id);
            opts.chp_charge = on(Tech::Chp);
            opts.eb_charge = on(Tech::Eb);
            opts.strict_complementarity = em.spec.strict_complementarity;
            merge_ordered(m, build_csp_flow_block(c, T, em.bundle, opts));
            for (int t = 1; t <= T; ++t) {
                const Term terms[] = {{col(uc_name("P_csp", c.group_id, t)), 1.0}, {cap, -em.bundle.cf_csp[t - 1]}};
                m.add_row(uc_name("csp_avail", c.group_id, t), terms, RowSense::Le, 0.0);
            }
        }
    }

    void eb()
    {
        const EbParams& e = em.library.eb;
        const int cap = add_capacity("eb", e.existing_capacity, e.max_build, e.capex_annualized, e.fixed_om);
        std::vector<int> p(T + 1), q(T + 1);
        for (int t = 1; t <= T; ++t)
            p[t] = m.add_column(fmt::format("P_eb[t={}]", t), 0.0, lp::kInf, e.var_cost * dt);
        for (int t = 1; t <= T; ++t)
            q[t] = m.add_column(fmt::format("Q_eb[t={}]", t), e.heat_out_min, lp::kInf);
        for (int t = 1; t <= T; ++t) {
            const Term pc[] = {{p[t], 1.0}, {cap, -1.0}};
            m.add_row(fmt::format("eb_power_cap[t={}]", t), pc, RowSense::Le, 0.0);
            const Term hc[] = {{q[t], 1.0}, {cap, -e.heat_out_max_frac}};
            m.add_row(fmt::format("eb_heat_max[t={}]", t), hc, RowSense::Le, 0.0);
            std::vector<Term> split{{p[t], e.eta_eb}, {q[t], -1.0}};
            if (on(Tech::Csp))
                for (const auto& c : em.library.csp)
                    split.push_back({col(uc_name("q_eb_to_tes", c.group_id, t)), -1.0});
            m.add_row(fmt::format("eb_split[t={}]", t), split, RowSense::Eq, 0.0);
        }
    }

    void system_rows()
    {
        const PolicySet& pol = em.library.policy;
        const bool heat_rows = on(Tech::Chp) || on(Tech::Eb) || on(Tech::Csp);
        std::vector<Term> rps_annual;
        double demand_sum = 0.0;
        for (int t = 1; t <= T; ++t) {
            const double de = em.bundle.demand_electric[t - 1];
            std::vector<Term> power, heat, reserve, renew;
            if (on(Tech::Coal))
                for (const auto& g : em.library.coal) {
                    power.push_back({col(uc_name("P_coal", g.group_id, t)), 1.0});
                    reserve.push_back({col(uc_name("SO", g.group_id, t)), g.reserve_credit_frac});
                }
            if (on(Tech::Wind)) {
                const int p = col(fmt::format("P_w[t={}]", t));
                power.push_back({p, 1.0});
                renew.push_back({p, 1.0});
                reserve.push_back({col("cap[wind]"), em.bundle.cf_wind[t - 1]});
                reserve.push_back({p, -pol.reserve_err_wind});
            }
            if (on(Tech::Pv)) {
                const int p = col(fmt::format("P_s[t={}]", t));
                power.push_back({p, 1.0});
                renew.push_back({p, 1.0});
                reserve.push_back({col("cap[pv]"), em.bundle.cf_pv[t - 1]});
                reserve.push_back({p, -pol.reserve_err_pv});
            }
            if (on(Tech::Csp))
                for (const auto& c : em.library.csp) {
                    const int p = col(uc_name("P_csp", c.group_id, t));
                    power.push_back({p, 1.0});
                    renew.push_back({p, 1.0});
                    reserve.push_back({col(inv_name("cap", c.group_id)), em.bundle.cf_csp[t - 1]});
                    reserve.push_back({p, -pol.reserve_err_csp});
                    heat.push_back({col(uc_name("q_tes_hd", c.group_id, t)), 1.0});
                }
            if (on(Tech::Chp)) {
                std::vector<Term> to_tes;
                for (const auto& h : em.library.chp) {
                    power.push_back({col(uc_name("P_chp", h.group_id, t)), 1.0});
                    reserve.push_back({col(uc_name("SO", h.group_id, t)), h.reserve_credit_frac});
                    heat.push_back({col(uc_name("Q_chp", h.group_id, t)), 1.0});
                    heat.push_back({col(uc_name("Q_chp_cur", h.group_id, t)), -1.0});
                    to_tes.push_back({col(uc_name("Q_chp_cur", h.group_id, t)), -1.0});
                }
                if (on(Tech::Csp)) {
                    // curtailed CHP heat may charge the stores; the rest is wasted
                    for (const auto& c : em.library.csp)
                        to_tes.push_back({col(uc_name("q_chp_to_tes", c.group_id, t)), 1.0});
                    m.add_row(fmt::format("chp_heat_to_tes[t={}]", t), to_tes, RowSense::Le, 0.0);
                }
            }
            if (on(Tech::Eb)) {
                power.push_back({col(fmt::format("P_eb[t={}]", t)), -1.0});
                heat.push_back({col(fmt::format("Q_eb[t={}]", t)), 1.0});
            }

            m.add_row(fmt::format("power_balance[t={}]", t), power, RowSense::Eq, de);
            if (heat_rows)
                m.add_row(fmt::format("heat_balance[t={}]", t), heat, RowSense::Eq, em.bundle.demand_heat[t - 1]);
            m.add_row(fmt::format("reserve[t={}]", t), reserve, RowSense::Ge, (1.0 + pol.reserve_demand_frac) * de);
            if (pol.rps_fraction > 0.0) {
                if (em.spec.rps_annual) {
                    for (const Term& r : renew)
                        rps_annual.push_back({r.col, r.coef * dt});
                    demand_sum += de * dt;
                } else {
                    m.add_row(fmt::format("rps[t={}]", t), renew, RowSense::Ge, pol.rps_fraction * de);
                }
            }
        }
        if (!rps_annual.empty())
            m.add_row("rps_annual", rps_annual, RowSense::Ge, pol.rps_fraction * demand_sum);
    }
};

void check_feasible_setup(const ExpansionModel& em)
{
    const TechSet& on = em.spec.enabled_techs;
    const auto& b = em.bundle;
    const double de = std::accumulate(b.demand_electric.begin(), b.demand_electric.end(), 0.0);
    const double dh = std::accumulate(b.demand_heat.begin(), b.demand_heat.end(), 0.0);
    const bool electric = on.has(Tech::Coal) || on.has(Tech::Wind) || on.has(Tech::Pv) || on.has(Tech::Chp) ||
                          on.has(Tech::Csp);
    const bool heat = on.has(Tech::Chp) || on.has(Tech::Eb) || on.has(Tech::Csp);
    const bool renewable = on.has(Tech::Wind) || on.has(Tech::Pv) || on.has(Tech::Csp);
    const auto fail = [&](const std::string& why) {
        throw Error(ErrorKind::InfeasibleBounds, fmt::format("scenario '{}': {}", em.spec.scenario_id, why));
    };
    if (de > 0.0 && !electric)
        fail("electric demand but no generating technology");
    if (dh > 0.0 && !heat)
        fail("heat demand but no heat technology (chp, csp or eb)");
    if (de > 0.0 && em.library.policy.rps_fraction > 0.0 && !renewable)
        fail("renewable share required but no renewable technology");
}

}  // namespace

ExpansionModel build_model(const ScenarioSpec& spec, const TimeSeriesBundle& bundle, const ParameterLibrary& library)
{
    spec.validate();
    bundle.validate();
    ExpansionModel em;
    em.spec = spec;
    em.library = library;
    if (!spec.overrides_json.empty())
        apply_overrides(em.library, spec.overrides_json);
    if (!std::isnan(spec.rps_fraction))
        em.library.policy.rps_fraction = spec.rps_fraction;
    em.library.validate();

    const int T = spec.horizon > 0 ? spec.horizon : bundle.horizon_hours;
    if (T < 1 || T > bundle.horizon_hours)
        throw Error(ErrorKind::MissingSeries,
                    fmt::format("horizon {} h but the bundle holds {} h", T, bundle.horizon_hours));
    em.bundle = T < bundle.horizon_hours ? slice_bundle(bundle, 0, T) : bundle;
    em.T = T;
    em.capacity_scale = capacity_cost_scale(T, bundle.dt_hours);
    if (spec.enabled_techs.has(Tech::Csp) && !em.library.csp.empty() && !em.bundle.has_csp)
        throw Error(ErrorKind::MissingSeries,
                    fmt::format("scenario '{}' enables CSP but the bundle has no cf_csp/dni series", spec.scenario_id));
    check_feasible_setup(em);

    Builder b{em, em.lp, spec.enabled_techs, T, em.bundle.dt_hours};
    if (b.on(Tech::Coal))
        b.coal();
    if (b.on(Tech::Wind))
        b.vre(em.library.wind, "wind", em.bundle.cf_wind, "P_w");
    if (b.on(Tech::Pv))
        b.vre(em.library.pv, "pv", em.bundle.cf_pv, "P_s");
    if (b.on(Tech::Chp))
        b.chp();
    if (b.on(Tech::Csp))
        b.csp();
    if (b.on(Tech::Eb))
        b.eb();
    b.system_rows();
    return em;
}

const CapacityPlan* PlanSolution::capacity(std::string_view tech, std::string_view group) const
{
    for (const auto& c : capacities)
        if (c.tech == tech && c.group == group)
            return &c;
    return nullptr;
}

std::vector<double> PlanSolution::total_power(Tech tech) const
{
    auto sum_groups = [](const std::vector<GroupDispatch>& gs, size_t T) {
        std::vector<double> out(T, 0.0);
        for (const auto& g : gs)
            for (size_t t = 0; t < T && t < g.power.size(); ++t)
                out[t] += g.power[t];
        return out;
    };
    const size_t T = wind.size();
    switch (tech) {
    case Tech::Coal: return sum_groups(coal, T);
    case Tech::Chp: return sum_groups(chp, T);
    case Tech::Csp: return sum_groups(csp, T);
    case Tech::Wind: return wind;
    case Tech::Pv: return pv;
    case Tech::Eb: return eb_power;
    }
    return {};
}

std::vector<double> PlanSolution::renewable_output() const
{
    std::vector<double> out = wind;
    const auto c = total_power(Tech::Csp);
    for (size_t t = 0; t < out.size(); ++t)
        out[t] += pv[t] + c[t];
    return out;
}

PlanSolution extract_solution(const ExpansionModel& em, const lp::Solution& raw, double tol)
{
    if (raw.status != lp::SolveStatus::Optimal && raw.status != lp::SolveStatus::Feasible)
        throw Error(ErrorKind::StatusNotOptimal, fmt::format("solver status {}", lp::to_string(raw.status)));
    if (static_cast<int>(raw.primal.size()) != em.lp.num_cols())
        throw Error(ErrorKind::ValidationError,
                    fmt::format("solution has {} values for {} columns", raw.primal.size(), em.lp.num_cols()));

    const TechSet& on = em.spec.enabled_techs;
    const int T = em.T;
    const double dt = em.bundle.dt_hours;
    const double s = em.capacity_scale;
    const PolicySet& pol = em.library.policy;
    auto v = [&](const std::string& name) { return raw.primal[static_cast<size_t>(em.column(name))]; };
    auto hourly = [&](auto&& name_of) {
        std::vector<double> out(T);
        for (int t = 1; t <= T; ++t)
            out[t - 1] = v(name_of(t));
        return out;
    };

    PlanSolution out;
    out.status = raw.status;
    out.objective = raw.objective;
    out.wind.assign(T, 0.0);
    out.pv.assign(T, 0.0);
    out.wind_available.assign(T, 0.0);
    out.pv_available.assign(T, 0.0);
    out.eb_power.assign(T, 0.0);
    out.eb_heat.assign(T, 0.0);
    out.eb_to_tes.assign(T, 0.0);

    // capacity cost of one group; also records the plan entry
    auto capacity = [&](std::string_view tech, const std::string& group, double existing, double capex, double fom) {
        CapacityPlan c{std::string(tech), group, existing, v(inv_name("build", group)), v(inv_name("cap", group))};
        out.capacities.push_back(c);
        return s * (capex * c.built + fom * c.total);
    };
    auto group_dispatch = [&](const std::string& group, const char* sym, double total, const CommitmentParams& cp) {
        GroupDispatch d;
        d.group = group;
        d.power = hourly([&](int t) { return uc_name(sym, group, t); });
        d.state = read_cluster_state(em.lp, raw, cp, T);
        d.state.group_total = total;
        return d;
    };
    auto startup_cost = [&](const GroupDispatch& d, double st) {
        return st * std::accumulate(d.state.startup_cap.begin(), d.state.startup_cap.end(), 0.0);
    };

    if (on.has(Tech::Coal))
        for (const auto& g : em.library.coal) {
            out.costs.coal += capacity("coal", g.group_id, g.existing_capacity, g.capex_annualized, g.fixed_om);
            GroupDispatch d = group_dispatch(g.group_id, "P_coal", out.capacities.back().total, commitment_params(g));
            out.costs.coal += g.fuel_cost * dt * std::accumulate(d.power.begin(), d.power.end(), 0.0);
            out.costs.coal += startup_cost(d, g.startup_cost);
            out.coal.push_back(std::move(d));
        }
    auto vre = [&](Tech tech, const VreParams& p, const std::vector<double>& cf, const char* sym,
                   std::vector<double>& disp, std::vector<double>& avail) {
        const std::string group(to_string(tech));
        double& cost = tech == Tech::Wind ? out.costs.wind : out.costs.pv;
        cost += capacity(group, group, p.existing_capacity, p.capex_annualized, p.fixed_om);
        const double total = out.capacities.back().total;
        disp = hourly([&](int t) { return fmt::format("{}[t={}]", sym, t); });
        for (int t = 0; t < T; ++t) {
            avail[t] = cf[t] * total;
            out.costs.curtailment += pol.curtail_penalty * (avail[t] - disp[t]) * dt;
        }
    };
    if (on.has(Tech::Wind))
        vre(Tech::Wind, em.library.wind, em.bundle.cf_wind, "P_w", out.wind, out.wind_available);
    if (on.has(Tech::Pv))
        vre(Tech::Pv, em.library.pv, em.bundle.cf_pv, "P_s", out.pv, out.pv_available);
    if (on.has(Tech::Chp))
        for (const auto& h : em.library.chp) {
            out.costs.chp += capacity("chp", h.group_id, h.existing_capacity, h.capex_annualized, h.fixed_om);
            GroupDispatch d = group_dispatch(h.group_id, "P_chp", out.capacities.back().total, commitment_params(h));
            d.heat = hourly([&](int t) { return uc_name("Q_chp", h.group_id, t); });
            d.heat_curtailed = hourly([&](int t) { return uc_name("Q_chp_cur", h.group_id, t); });
            for (int t = 0; t < T; ++t)
                out.costs.chp += h.fuel_cost * (d.power[t] + h.c_v * d.heat[t]) * dt;
            out.costs.chp += startup_cost(d, h.startup_cost);
            out.chp.push_back(std::move(d));
        }
    if (on.has(Tech::Csp))
        for (const auto& c : em.library.csp) {
            out.costs.csp += capacity("csp", c.group_id, c.existing_capacity, c.capex_annualized, c.fixed_om);
            out.csp.push_back(group_dispatch(c.group_id, "P_csp", out.capacities.back().total, commitment_params(c)));
            out.csp_flows.push_back(read_csp_flows(em.lp, raw, c.group_id, T));
        }
    if (on.has(Tech::Eb)) {
        const EbParams& e = em.library.eb;
        out.costs.eb += capacity("eb", "eb", e.existing_capacity, e.capex_annualized, e.fixed_om);
        out.eb_power = hourly([](int t) { return fmt::format("P_eb[t={}]", t); });
        out.eb_heat = hourly([](int t) { return fmt::format("Q_eb[t={}]", t); });
        for (const auto& f : out.csp_flows)
            for (int t = 0; t < T; ++t)
                out.eb_to_tes[t] += f.q_eb_to_tes[t];
        out.costs.eb += e.var_cost * dt * std::accumulate(out.eb_power.begin(), out.eb_power.end(), 0.0);
    }

    // Balances recomputed from the extracted series.
    const auto coal_p = out.total_power(Tech::Coal);
    const auto chp_p = out.total_power(Tech::Chp);
    const auto csp_p = out.total_power(Tech::Csp);
    const bool heat_rows = on.has(Tech::Chp) || on.has(Tech::Eb) || on.has(Tech::Csp);
    for (int t = 0; t < T; ++t) {
        const double de = em.bundle.demand_electric[t];
        const double supply = coal_p[t] + out.wind[t] + out.pv[t] + csp_p[t] + chp_p[t];
        out.power_balance_residual =
            std::max(out.power_balance_residual, std::abs(supply - de - out.eb_power[t]) / std::max(1.0, de));
        if (heat_rows) {
            const double dh = em.bundle.demand_heat[t];
            double heat = out.eb_heat[t];
            for (const auto& f : out.csp_flows)
                heat += f.q_tes_hd[t];
            for (const auto& d : out.chp)
                heat += d.heat[t] - d.heat_curtailed[t];
            out.heat_balance_residual = std::max(out.heat_balance_residual, std::abs(heat - dh) / std::max(1.0, dh));
        }
    }
    if (out.power_balance_residual > tol || out.heat_balance_residual > tol)
        throw Error(ErrorKind::ResidualTooLarge, fmt::format("balance residual power {:.3e}, heat {:.3e} exceeds {:.1e}",
                                                             out.power_balance_residual, out.heat_balance_residual, tol));
    const double total = out.costs.total();
    if (std::abs(total - raw.objective) > tol * std::max(1.0, std::abs(raw.objective)))
        throw Error(ErrorKind::ResidualTooLarge,
                    fmt::format("cost components sum to {} but the objective is {}", total, raw.objective));
    return out;
}

}  // namespace capexp
