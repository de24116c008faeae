#include "capexp/metrics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "capexp/csp_thermal.hpp"
#include "capexp/error.hpp"
#include "json.hpp"

namespace capexp {

CurtailmentStats curtailment_rate(std::span<const std::vector<double>> available,
                                  std::span<const std::vector<double>> dispatched, double dt)
{
    if (available.size() != dispatched.size())
        throw Error(ErrorKind::ValidationError, "curtailment_rate: series count mismatch");
    CurtailmentStats s;
    for (size_t k = 0; k < available.size(); ++k) {
        if (available[k].size() != dispatched[k].size())
            throw Error(ErrorKind::ValidationError, "curtailment_rate: series length mismatch");
        for (size_t t = 0; t < available[k].size(); ++t) {
            s.available += available[k][t] * dt;
            s.curtailed += (available[k][t] - dispatched[k][t]) * dt;
        }
    }
    if (s.available > 0.0) {
        s.rate = std::clamp(s.curtailed / s.available, 0.0, 1.0);
    } else {
        s.zero_denominator = true;
        s.rate = 0.0;
    }
    return s;
}

CurtailmentStats curtailment_rate(const PlanSolution& sol, double dt)
{
    const std::vector<double> avail[] = {sol.wind_available, sol.pv_available};
    const std::vector<double> disp[] = {sol.wind, sol.pv};
    return curtailment_rate(avail, disp, dt);
}

double coal_factor(const PolicySet& policy, const CoalGroupParams& g)
{
    return policy.carbon_factor_coal >= 0.0 ? policy.carbon_factor_coal : g.carbon_factor;
}

double chp_factor(const PolicySet& policy, const ChpGroupParams& g)
{
    return policy.carbon_factor_chp >= 0.0 ? policy.carbon_factor_chp : g.carbon_factor;
}

std::vector<int> month_starts(int T)
{
    std::vector<int> starts;
    if (T == 8760) {
        static constexpr int days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
        int h = 0;
        for (int d : days) {
            starts.push_back(h);
            h += 24 * d;
        }
    } else {
        for (int h = 0; h < T; h += 730)
            starts.push_back(h);
    }
    return starts;
}

CarbonReport carbon_emissions(const PlanSolution& sol, const ParameterLibrary& library, double dt)
{
    const size_t T = sol.wind.size();
    CarbonReport r;
    r.hourly.assign(T, 0.0);
    auto find_coal = [&](const std::string& id) -> const CoalGroupParams& {
        for (const auto& g : library.coal)
            if (g.group_id == id)
                return g;
        throw Error(ErrorKind::ValidationError, fmt::format("unknown coal group '{}'", id));
    };
    auto find_chp = [&](const std::string& id) -> const ChpGroupParams& {
        for (const auto& g : library.chp)
            if (g.group_id == id)
                return g;
        throw Error(ErrorKind::ValidationError, fmt::format("unknown CHP group '{}'", id));
    };
    for (const auto& d : sol.coal) {
        const double w = coal_factor(library.policy, find_coal(d.group));
        for (size_t t = 0; t < T; ++t)
            r.hourly[t] += w * d.power[t] * dt;
    }
    for (const auto& d : sol.chp) {
        const ChpGroupParams& g = find_chp(d.group);
        const double w = chp_factor(library.policy, g);
        for (size_t t = 0; t < T; ++t)
            r.hourly[t] += w * (d.power[t] + g.c_v * d.heat[t]) * dt;
    }
    const std::vector<int> starts = month_starts(static_cast<int>(T));
    for (size_t m = 0; m < starts.size(); ++m) {
        const int end = m + 1 < starts.size() ? starts[m + 1] : static_cast<int>(T);
        r.monthly.push_back(std::accumulate(r.hourly.begin() + starts[m], r.hourly.begin() + end, 0.0));
    }
    r.total = std::accumulate(r.hourly.begin(), r.hourly.end(), 0.0);
    return r;
}

double lcoe(std::span<const YearCost> costs, std::span<const YearEnergy> energy, double r)
{
    if (costs.size() != energy.size() || costs.empty())
        throw Error(ErrorKind::ValidationError, "lcoe: cost and energy streams need the same nonzero length");
    if (!(r >= 0.0))
        throw Error(ErrorKind::ValidationError, "lcoe: discount rate must be >= 0");
    double num = 0.0, den = 0.0;
    for (size_t k = 0; k < costs.size(); ++k) {
        const double f = std::pow(1.0 + r, static_cast<double>(k + 1));
        num += (costs[k].investment + costs[k].maintenance + costs[k].operation) / f;
        den += (energy[k].electric + energy[k].heat) / f;
    }
    if (!(den > 0.0))
        throw Error(ErrorKind::ZeroEnergy, "lcoe: discounted energy is zero");
    return num / den;
}

std::vector<double> net_load(const PlanSolution& sol, const TimeSeriesBundle& bundle)
{
    std::vector<double> out(sol.wind.size());
    for (size_t t = 0; t < out.size(); ++t)
        out[t] = bundle.demand_electric.at(t) - sol.wind[t] - sol.pv[t];
    return out;
}

PeakValley peak_valley(std::span<const double> load)
{
    PeakValley pv;
    if (load.empty())
        return pv;
    const auto [lo, hi] = std::minmax_element(load.begin(), load.end());
    pv.peak = *hi;
    pv.valley = *lo;
    pv.difference = pv.peak - pv.valley;
    pv.rate = pv.peak > 0.0 ? pv.difference / pv.peak : 0.0;
    return pv;
}

PeakValley peak_valley(const PlanSolution& sol, const TimeSeriesBundle& bundle)
{
    return peak_valley(net_load(sol, bundle));
}

double benefit_triangle(double a, double b, double c)
{
    for (double v : {a, b, c})
        if (!(v > 0.0) || !std::isfinite(v))
            throw Error(ErrorKind::NonPositiveIndex, fmt::format("benefit_triangle: index {} is not positive", v));
    return 0.5 * std::sin(2.0 * std::numbers::pi / 3.0) * (a * b + b * c + c * a);
}

MetricsReport compute_metrics(const ExpansionModel& model, const PlanSolution& sol)
{
    const double dt = model.bundle.dt_hours;
    MetricsReport m;
    m.scenario_id = model.spec.scenario_id;
    m.objective = sol.objective;
    m.costs = sol.costs;
    m.curtailment = curtailment_rate(sol, dt);
    m.carbon = carbon_emissions(sol, model.library, dt);
    m.peak_valley = peak_valley(sol, model.bundle);

    const TechSet& on = model.spec.enabled_techs;
    auto sum = [](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); };
    auto per_kwh = [&](Tech tech, double cost, double electric_mwh, double heat_mwh) {
        TechLcoe l{std::string(to_string(tech)), std::nullopt};
        const YearCost c{0.0, 0.0, cost};
        const YearEnergy e{electric_mwh * 1e3, heat_mwh * 1e3};
        if (e.electric + e.heat > 0.0)
            l.per_kwh = lcoe(std::span(&c, 1), std::span(&e, 1), model.library.policy.discount_rate);
        m.lcoe_per_tech.push_back(l);
    };
    if (on.has(Tech::Coal))
        per_kwh(Tech::Coal, sol.costs.coal, sum(sol.total_power(Tech::Coal)) * dt, 0.0);
    if (on.has(Tech::Wind))
        per_kwh(Tech::Wind, sol.costs.wind, sum(sol.wind) * dt, 0.0);
    if (on.has(Tech::Pv))
        per_kwh(Tech::Pv, sol.costs.pv, sum(sol.pv) * dt, 0.0);
    if (on.has(Tech::Chp)) {
        double heat = 0.0;
        for (const auto& d : sol.chp)
            heat += sum(d.heat) - sum(d.heat_curtailed);
        per_kwh(Tech::Chp, sol.costs.chp, sum(sol.total_power(Tech::Chp)) * dt, heat * dt);
    }
    if (on.has(Tech::Csp)) {
        double heat = 0.0;
        for (const auto& f : sol.csp_flows)
            heat += sum(f.q_tes_hd);
        per_kwh(Tech::Csp, sol.costs.csp, sum(sol.total_power(Tech::Csp)) * dt, heat * dt);
    }
    if (on.has(Tech::Eb))
        per_kwh(Tech::Eb, sol.costs.eb, 0.0, (sum(sol.eb_heat) + sum(sol.eb_to_tes)) * dt);

    const double demand = sum(model.bundle.demand_electric);
    m.renewable_share = demand > 0.0 ? sum(sol.renewable_output()) / demand : 0.0;
    for (const auto& f : sol.csp_flows)
        m.complementarity_hours += static_cast<int>(complementarity_violations(f).size());
    return m;
}

std::string metrics_to_json(const MetricsReport& r)
{
    using nlohmann::json;
    auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    json doc;
    doc["scenario_id"] = r.scenario_id;
    doc["objective"] = num(r.objective);
    doc["cost_components"] = {{"coal", num(r.costs.coal)}, {"wind", num(r.costs.wind)},
                              {"pv", num(r.costs.pv)},     {"csp", num(r.costs.csp)},
                              {"chp", num(r.costs.chp)},   {"eb", num(r.costs.eb)},
                              {"curtailment", num(r.costs.curtailment)}};
    doc["curtailment"] = {{"curtailed_mwh", num(r.curtailment.curtailed)},
                          {"available_mwh", num(r.curtailment.available)},
                          {"rate", num(r.curtailment.rate)},
                          {"zero_denominator", r.curtailment.zero_denominator}};
    json monthly = json::array();
    for (double v : r.carbon.monthly)
        monthly.push_back(num(v));
    doc["carbon"] = {{"total_t", num(r.carbon.total)}, {"monthly_t", monthly}};
    json lc = json::object();
    for (const auto& l : r.lcoe_per_tech)
        lc[l.tech] = l.per_kwh ? num(*l.per_kwh) : json(nullptr);
    doc["lcoe_per_kwh"] = lc;
    doc["peak_valley"] = {{"difference_mw", num(r.peak_valley.difference)},
                          {"rate", num(r.peak_valley.rate)},
                          {"peak_mw", num(r.peak_valley.peak)},
                          {"valley_mw", num(r.peak_valley.valley)}};
    doc["renewable_share"] = num(r.renewable_share);
    doc["complementarity_hours"] = r.complementarity_hours;
    doc["benefit_triangle_area"] = r.benefit_triangle_area ? num(*r.benefit_triangle_area) : json(nullptr);
    return doc.dump(2);
}

}  // namespace capexp
