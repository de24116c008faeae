#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "capexp/error.hpp"
#include "capexp/expansion_model.hpp"
#include "capexp/scenario.hpp"
#include "capexp/simplex.hpp"
#include "capexp/toy_instance.hpp"

using namespace capexp;
using lp::SolveStatus;

namespace {

const TechSet kS1{Tech::Coal, Tech::Wind, Tech::Pv, Tech::Chp};
const TechSet kAll{Tech::Coal, Tech::Wind, Tech::Pv, Tech::Chp, Tech::Csp, Tech::Eb};

TimeSeriesBundle flat_bundle(std::vector<double> demand)
{
    const int T = static_cast<int>(demand.size());
    TimeSeriesBundle b;
    b.horizon_hours = T;
    b.demand_electric = std::move(demand);
    b.demand_heat.assign(T, 0.0);
    b.cf_wind.assign(T, 0.4);
    b.cf_pv.assign(T, 0.0);
    b.cf_csp.assign(T, 0.0);
    b.dni.assign(T, 0.0);
    b.has_csp = false;
    return b;
}

// One flexible coal group with no commitment economics: the optimal plan is
// then a pure sizing problem.
ParameterLibrary sizing_library(double capex, double fuel)
{
    ParameterLibrary lib;
    CoalGroupParams g;
    g.group_id = "coal";
    g.existing_capacity = 0.0;
    g.min_output_frac = 0.0;
    g.max_output_frac = 0.9;
    g.ramp_frac_per_h = 1.0;
    g.min_up_h = 1;
    g.min_down_h = 1;
    g.capex_annualized = capex;
    g.fuel_cost = fuel;
    lib.coal.push_back(g);
    lib.policy.rps_fraction = 0.0;
    lib.policy.reserve_demand_frac = 0.0;
    return lib;
}

ScenarioSpec spec_for(const std::string& id, TechSet techs, int horizon = 0)
{
    ScenarioSpec s;
    s.scenario_id = id;
    s.enabled_techs = techs;
    s.horizon = horizon;
    return s;
}

struct Solved {
    ExpansionModel em;
    lp::Solution raw;
    PlanSolution plan;
};

Solved solve(const ScenarioSpec& spec, const TimeSeriesBundle& b, const ParameterLibrary& lib)
{
    Solved s{build_model(spec, b, lib), {}, {}};
    s.raw = lp::solve_lp(s.em.lp);
    EXPECT_EQ(s.raw.status, SolveStatus::Optimal) << spec.scenario_id;
    if (s.raw.status == SolveStatus::Optimal)
        s.plan = extract_solution(s.em, s.raw);
    return s;
}

bool any_column_with(const lp::LpModel& m, std::string_view needle)
{
    for (int j = 0; j < m.num_cols(); ++j)
        if (m.col_name(j).find(needle) != std::string::npos)
            return true;
    return false;
}

class ToyDay : public ::testing::Test {
protected:
    static void SetUpTestSuite()
    {
        toy_ = new ToyInstance(make_toy_instance(1, 48, kAll));
    }
    static void TearDownTestSuite()
    {
        delete toy_;
        toy_ = nullptr;
    }
    static ToyInstance* toy_;
};
ToyInstance* ToyDay::toy_ = nullptr;

}  // namespace

TEST(TechNames, RoundTrip)
{
    for (Tech t : kAllTechs)
        EXPECT_EQ(parse_tech(to_string(t)), t);
    EXPECT_FALSE(parse_tech("nuclear"));
    TechSet s{Tech::Pv, Tech::Coal};
    EXPECT_EQ(s.list(), (std::vector<Tech>{Tech::Coal, Tech::Pv}));
}

TEST(CapacityScale, ProratesToHorizon)
{
    EXPECT_DOUBLE_EQ(capacity_cost_scale(8760, 1.0), 1.0);
    EXPECT_DOUBLE_EQ(capacity_cost_scale(168, 1.0), 168.0 / 8760.0);
    EXPECT_DOUBLE_EQ(capacity_cost_scale(4380, 2.0), 1.0);
}

TEST(ExpansionModel, ZeroDemandBuildsNothing)
{
    ParameterLibrary lib = sizing_library(5e4, 30.0);
    lib.wind.capex_annualized = 1e5;
    const Solved s = solve(spec_for("zero", {Tech::Coal, Tech::Wind}), flat_bundle({0.0, 0.0}), lib);
    EXPECT_NEAR(s.plan.objective, 0.0, 1e-9);
    for (const auto& c : s.plan.capacities)
        EXPECT_NEAR(c.built, 0.0, 1e-9) << c.tech << "/" << c.group;
}

TEST(ExpansionModel, CoalSizingMatchesBruteForce)
{
    // Blocks starting in an hour deliver at most minimum output (zero here),
    // so the fleet gets one idle hour to come online.
    const std::vector<double> demand = {0, 300, 500, 420, 250};
    const double capex = 8e4, fuel = 30.0;
    const ParameterLibrary lib = sizing_library(capex, fuel);
    const Solved s = solve(spec_for("coal", {Tech::Coal}), flat_bundle(demand), lib);

    // Scan candidate sizes; each feasible size costs capital plus the fixed fuel bill.
    const double scale = capacity_cost_scale(5, 1.0);
    const double fuel_bill = fuel * std::accumulate(demand.begin(), demand.end(), 0.0);
    const double peak = *std::max_element(demand.begin(), demand.end());
    double best = std::numeric_limits<double>::infinity(), best_b = 0.0;
    for (int k = 0; k <= 20000; ++k) {
        const double b = 0.05 * k;
        if (b * 0.9 + 1e-9 < peak)
            continue;
        const double cost = scale * capex * b + fuel_bill;
        if (cost < best) {
            best = cost;
            best_b = b;
        }
    }
    const CapacityPlan* c = s.plan.capacity("coal", "coal");
    ASSERT_NE(c, nullptr);
    EXPECT_NEAR(c->built, best_b, 0.05);
    EXPECT_NEAR(s.plan.objective, best, 1e-6 * best + scale * capex * 0.05);
    EXPECT_NEAR(s.plan.costs.total(), s.plan.objective, 1e-6 * best);
}

TEST(ExpansionModel, MissingHeatSourceIsInfeasibleSetup)
{
    TimeSeriesBundle b = flat_bundle({100, 100});
    b.demand_heat = {10, 10};
    try {
        build_model(spec_for("x", {Tech::Coal}), b, sizing_library(1, 1));
        ADD_FAILURE() << "heat demand without a heat source accepted";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InfeasibleBounds);
    }
}

TEST(ExpansionModel, HorizonBeyondBundle)
{
    try {
        build_model(spec_for("x", {Tech::Coal}, 10), flat_bundle({1, 1}), sizing_library(1, 1));
        ADD_FAILURE();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::MissingSeries);
    }
}

TEST_F(ToyDay, BaseScenarioHasNoCspOrBoilerColumns)
{
    const ExpansionModel em = build_model(spec_for("s1", kS1), toy_->bundle, toy_->library);
    EXPECT_FALSE(any_column_with(em.lp, "csp"));
    EXPECT_FALSE(any_column_with(em.lp, "_eb"));
    EXPECT_FALSE(any_column_with(em.lp, "[eb"));
    EXPECT_TRUE(any_column_with(em.lp, "P_w[t=1]"));
    EXPECT_THROW(em.column("P_csp[csp,t=1]"), Error);
    EXPECT_EQ(em.lp.find_row("rps[t=48]").has_value(), true);
}

TEST_F(ToyDay, EveryColumnNameResolves)
{
    const ExpansionModel em = build_model(scenario_preset("s3", toy_->library), toy_->bundle, toy_->library);
    for (int j = 0; j < em.lp.num_cols(); ++j)
        ASSERT_EQ(em.column(em.lp.col_name(j)), j);
}

TEST_F(ToyDay, NestedScenariosNeverCostMore)
{
    double prev = std::numeric_limits<double>::infinity();
    for (const char* id : {"s1", "s2", "s3"}) {
        const Solved s = solve(scenario_preset(id, toy_->library), toy_->bundle, toy_->library);
        EXPECT_LE(s.plan.objective, prev * (1 + 1e-6)) << id;
        prev = s.plan.objective;
    }
}

TEST_F(ToyDay, LongerStorageNeverCostsMore)
{
    double prev = std::numeric_limits<double>::infinity();
    for (double hours : {8.0, 10.0, 12.0}) {
        ScenarioSpec spec = scenario_preset("s2", toy_->library);
        spec.overrides_json = "{\"csp\":{\"*\":{\"storage_hours\":" + std::to_string(hours) + "}}}";
        const Solved s = solve(spec, toy_->bundle, toy_->library);
        EXPECT_LE(s.plan.objective, prev * (1 + 1e-6)) << hours;
        prev = s.plan.objective;
    }
}

TEST_F(ToyDay, HourlyRenewableShareHolds)
{
    const Solved s = solve(scenario_preset("s2", toy_->library), toy_->bundle, toy_->library);
    const double rps = s.em.library.policy.rps_fraction;
    const std::vector<double> renew = s.plan.renewable_output();
    for (int t = 0; t < s.em.T; ++t)
        EXPECT_GE(renew[t], rps * toy_->bundle.demand_electric[t] - 1e-6) << t;
    EXPECT_LE(s.plan.power_balance_residual, 1e-6);
    EXPECT_LE(s.plan.heat_balance_residual, 1e-6);
}

TEST_F(ToyDay, AnnualShareIsOneRowAndNoDearer)
{
    ScenarioSpec hourly = scenario_preset("s1", toy_->library);
    ScenarioSpec annual = hourly;
    annual.rps_annual = true;
    const Solved a = solve(annual, toy_->bundle, toy_->library);
    EXPECT_TRUE(a.em.lp.find_row("rps_annual").has_value());
    EXPECT_FALSE(a.em.lp.find_row("rps[t=1]").has_value());
    const Solved h = solve(hourly, toy_->bundle, toy_->library);
    EXPECT_LE(a.plan.objective, h.plan.objective * (1 + 1e-9));
    const std::vector<double> renew = a.plan.renewable_output();
    const double total = std::accumulate(renew.begin(), renew.end(), 0.0);
    const double demand = std::accumulate(toy_->bundle.demand_electric.begin(), toy_->bundle.demand_electric.begin() + 48, 0.0);
    EXPECT_GE(total, a.em.library.policy.rps_fraction * demand - 1e-6);
}

TEST_F(ToyDay, FreeCurtailmentStaysBounded)
{
    ScenarioSpec spec = scenario_preset("s2", toy_->library);
    spec.overrides_json = "{\"policy\":{\"curtail_penalty\":0}}";
    const Solved s = solve(spec, toy_->bundle, toy_->library);
    EXPECT_TRUE(std::isfinite(s.plan.objective));
    EXPECT_NEAR(s.plan.costs.curtailment, 0.0, 1e-9);
}

TEST_F(ToyDay, CostComponentsSumToObjective)
{
    const Solved s = solve(scenario_preset("s3", toy_->library), toy_->bundle, toy_->library);
    EXPECT_NEAR(s.plan.costs.total(), s.raw.objective, 1e-6 * std::abs(s.raw.objective));
    for (double v : {s.plan.costs.curtailment})
        EXPECT_GE(v, -1e-9);
}

TEST_F(ToyDay, ExtractRejectsUnsolvedStatus)
{
    const ExpansionModel em = build_model(spec_for("s1", kS1), toy_->bundle, toy_->library);
    lp::Solution raw;
    raw.status = SolveStatus::Infeasible;
    try {
        extract_solution(em, raw);
        ADD_FAILURE();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::StatusNotOptimal);
    }
}

TEST_F(ToyDay, ExtractRejectsUnbalancedSolution)
{
    const ExpansionModel em = build_model(spec_for("s1", kS1), toy_->bundle, toy_->library);
    lp::Solution raw;
    raw.status = SolveStatus::Feasible;
    raw.primal.assign(em.lp.num_cols(), 0.0);
    try {
        extract_solution(em, raw);
        ADD_FAILURE();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ResidualTooLarge);
    }
}

TEST(ScenarioSpec, ValidateRejectsBadFractions)
{
    ScenarioSpec s = spec_for("x", {Tech::Coal});
    s.rps_fraction = 1.5;
    EXPECT_THROW(s.validate(), Error);
    s.rps_fraction = 0.5;
    s.initial_online_frac = -0.1;
    EXPECT_THROW(s.validate(), Error);
    s.initial_online_frac = 0.5;
    EXPECT_NO_THROW(s.validate());
    s.enabled_techs = {};
    EXPECT_THROW(s.validate(), Error);
}
