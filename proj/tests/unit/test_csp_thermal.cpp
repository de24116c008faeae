#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "capexp/branch_and_bound.hpp"
#include "capexp/cluster_uc.hpp"
#include "capexp/csp_thermal.hpp"
#include "capexp/error.hpp"
#include "capexp/simplex.hpp"

using namespace capexp;
using lp::LpModel;
using lp::SolveStatus;

namespace {

CspGroupParams plant(double capacity)
{
    CspGroupParams p;
    p.group_id = "csp";
    p.existing_capacity = capacity;
    return p;
}

TimeSeriesBundle sunny_bundle(int T, int sun_hours, double dni)
{
    TimeSeriesBundle b;
    b.horizon_hours = T;
    b.demand_electric.assign(T, 0.0);
    b.demand_heat.assign(T, 0.0);
    b.cf_wind.assign(T, 0.0);
    b.cf_pv.assign(T, 0.0);
    b.cf_csp.assign(T, 1.0);
    b.dni.assign(T, 0.0);
    for (int t = 6; t < 6 + sun_hours && t < T; ++t)
        b.dni[t] = dni;
    return b;
}

// P_csp columns with a price per hour, then the flow block on top.
LpModel plant_model(const CspGroupParams& p, const TimeSeriesBundle& bundle, std::vector<double> price,
                    const CspFlowOptions& opts = {})
{
    LpModel m;
    const int T = bundle.horizon_hours;
    for (int t = 1; t <= T; ++t)
        m.add_column(uc_name("P_csp", p.group_id, t), 0.0, p.existing_capacity, -price[t - 1]);
    merge_block(m, build_csp_flow_block(p, T, bundle, opts));
    return m;
}

double total_output(const LpModel& m, const lp::Solution& s, int T)
{
    double sum = 0.0;
    for (int t = 1; t <= T; ++t)
        sum += s.primal[*m.find_col(uc_name("P_csp", "csp", t))];
    return sum;
}

}  // namespace

TEST(CspPhysics, SolarFieldCapture)
{
    EXPECT_NEAR(sf_thermal_input(1e6, 0.8, 0.37), 296.0, 1e-9);
    EXPECT_EQ(sf_thermal_input(5e5, 0.0, 0.37), 0.0);
    EXPECT_EQ(sf_thermal_input(0.0, 1.0, 0.37), 0.0);
}

TEST(CspPhysics, StorageStep)
{
    EXPECT_NEAR(step_tes_soc(1000, 100, 0, 0.00031, 1), 1099.69, 1e-9);
    EXPECT_EQ(step_tes_soc(500, 0, 0, 0, 1), 500.0);
    EXPECT_EQ(step_tes_soc(0, 0, 0, 0.00031, 1), 0.0);
    EXPECT_NEAR(step_tes_soc(100, 0, 40, 0.0, 0.5), 80.0, 1e-12);
}

TEST(CspPhysics, FieldSizedBySolarMultiple)
{
    const CspGroupParams p = plant(100.0);
    // at design DNI the field feeds solar_multiple times the PB rated input
    const double area = solar_field_area(p, 100.0);
    EXPECT_NEAR(sf_thermal_input(area, p.dni_design, p.eta_sf), p.solar_multiple * 100.0 / p.eta_pb, 1e-9);
    EXPECT_NEAR(tes_capacity(p, 100.0), 10.0 * 250.0, 1e-9);
}

TEST(EmergencyReserve, ThreeCases)
{
    EXPECT_DOUBLE_EQ(emergency_reserve(80, 100, 30), 20.0);
    EXPECT_DOUBLE_EQ(emergency_reserve(80, 100, 10), 10.0);
    EXPECT_DOUBLE_EQ(emergency_reserve(100, 100, 50), 0.0);
    try {
        emergency_reserve(120, 100, 5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidState);
    }
}

TEST(EmergencyReserve, ContinuousAndBoundedByHeadroom)
{
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 500; ++k) {
        const double cap = 200.0 * u(rng);
        const double p = cap * u(rng);
        const double s = 300.0 * u(rng);
        const double r = emergency_reserve(p, cap, s);
        EXPECT_LE(r, cap - p + 1e-12);
        EXPECT_LE(r, s + 1e-12);
        EXPECT_GE(r, 0.0);
        EXPECT_NEAR(emergency_reserve(p, cap, s + 1e-7), r, 1.0001e-7);
    }
}

TEST(CspFlowBlock, PowerBlockCoupling)
{
    const CspGroupParams p = plant(100.0);
    TimeSeriesBundle b = sunny_bundle(4, 0, 0.0);
    b.dni.assign(4, 0.95);
    LpModel m = plant_model(p, b, {0, 0, 0, 0});
    const int pc = *m.find_col(uc_name("P_csp", "csp", 1));
    m.set_bounds(pc, 40.0, 40.0);
    const auto s = lp::solve_lp(m);
    ASSERT_EQ(s.status, SolveStatus::Optimal);
    EXPECT_NEAR(s.primal[*m.find_col(uc_name("q_htf_pb", "csp", 1))], 100.0, 1e-7);
}

TEST(CspFlowBlock, NoSunMeansNoOutput)
{
    const CspGroupParams p = plant(100.0);
    const TimeSeriesBundle b = sunny_bundle(24, 0, 0.0);
    const LpModel m = plant_model(p, b, std::vector<double>(24, 1.0));
    const auto s = lp::solve_lp(m);
    ASSERT_EQ(s.status, SolveStatus::Optimal);
    EXPECT_NEAR(total_output(m, s, 24), 0.0, 1e-7);
}

TEST(CspFlowBlock, DayOfSunMatchesHandEnergyBalance)
{
    // Six hours at design DNI on a 100 MW plant: the field delivers 600 MW-th,
    // the PB takes 250 MW-th directly and the rest is stored, then drained
    // overnight through both efficiencies.
    CspGroupParams p = plant(100.0);
    p.tes_loss_frac_per_h = 0.0;
    const int T = 24;
    const TimeSeriesBundle b = sunny_bundle(T, 6, p.dni_design);
    const LpModel m = plant_model(p, b, std::vector<double>(T, 1.0));
    const auto s = lp::solve_lp(m);
    ASSERT_EQ(s.status, SolveStatus::Optimal);

    const double field = p.solar_multiple * 100.0 / p.eta_pb;  // 600
    const double direct = 6 * 250.0;
    const double stored = 6 * (field - 250.0);
    ASSERT_LE(stored, tes_capacity(p, 100.0));
    const double expected = p.eta_pb * (direct + stored * p.eta_tes_cha * p.eta_tes_dis);
    EXPECT_NEAR(total_output(m, s, T), expected, 1e-6);
}

TEST(CspFlowBlock, SolvedFlowsSatisfyBalancesAndAccounting)
{
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 5; ++rep) {
        CspGroupParams p = plant(50.0 + 100.0 * u(rng));
        p.storage_hours = 4.0 + 8.0 * u(rng);
        p.soc_min_frac = 0.1 * u(rng);
        const int T = 48;
        TimeSeriesBundle b = sunny_bundle(T, 0, 0.0);
        std::vector<double> price(T);
        for (int t = 0; t < T; ++t) {
            const double hour = t % 24;
            b.dni[t] = (hour >= 7 && hour <= 18) ? 0.95 * std::sin((hour - 6) / 13.0 * M_PI) * u(rng) : 0.0;
            price[t] = 10.0 + 40.0 * u(rng);
        }
        const LpModel m = plant_model(p, b, price);
        const auto s = lp::solve_lp(m);
        ASSERT_EQ(s.status, SolveStatus::Optimal);

        const CspFlowVars f = read_csp_flows(m, s, "csp", T);
        const CspBalanceCheck c = check_csp_balances(f, p, 1.0);
        EXPECT_LE(c.htf_residual, 1e-6);
        EXPECT_LE(c.soc_residual, 1e-6);
        EXPECT_LE(c.periodicity_gap, 1e-8);

        double pb = 0.0, sf = 0.0;
        for (int t = 0; t < T; ++t) {
            pb += f.q_htf_pb[t];
            sf += f.q_sf_htf[t];
            EXPECT_GE(f.soc[t + 1], p.soc_min_frac * tes_capacity(p, p.existing_capacity) - 1e-6);
            EXPECT_LE(f.soc[t + 1], tes_capacity(p, p.existing_capacity) + 1e-6);
        }
        EXPECT_LE(pb, sf + f.soc[0] + 1e-6);
    }
}

TEST(CspFlowBlock, SizedModeMatchesFixedCapacity)
{
    CspGroupParams p = plant(80.0);
    p.soc_min_frac = 0.05;
    const int T = 24;
    const TimeSeriesBundle b = sunny_bundle(T, 9, 0.8);
    std::vector<double> price(T, 1.0);
    const auto fixed = lp::solve_lp(plant_model(p, b, price));

    LpModel m;
    m.add_column("cap[csp]", 80.0, 80.0, 0.0);
    for (int t = 1; t <= T; ++t)
        m.add_column(uc_name("P_csp", "csp", t), 0.0, 80.0, -price[t - 1]);
    CspFlowOptions opts;
    opts.capacity_var = "cap[csp]";
    merge_block(m, build_csp_flow_block(p, T, b, opts));
    const auto sized = lp::solve_lp(m);
    ASSERT_EQ(fixed.status, SolveStatus::Optimal);
    ASSERT_EQ(sized.status, SolveStatus::Optimal);
    EXPECT_NEAR(sized.objective, fixed.objective, 1e-6 * std::abs(fixed.objective));

    LpModel bare;
    for (int t = 1; t <= T; ++t)
        bare.add_column(uc_name("P_csp", "csp", t), 0.0, 80.0, 0.0);
    EXPECT_THROW(merge_block(bare, build_csp_flow_block(p, T, b, opts)), Error);
}

TEST(CspFlowBlock, StrictModeRemovesSimultaneousFlows)
{
    CspGroupParams p = plant(60.0);
    p.tes_power_rating = 400.0;
    const int T = 24;
    TimeSeriesBundle b = sunny_bundle(T, 8, 0.9);
    std::vector<double> price(T);
    for (int t = 0; t < T; ++t)
        price[t] = 20.0 + 15.0 * std::cos(2.0 * M_PI * t / 24.0);
    CspFlowOptions strict;
    strict.strict_complementarity = true;
    const LpModel relaxed_m = plant_model(p, b, price);
    const LpModel strict_m = plant_model(p, b, price, strict);
    const auto relaxed = lp::solve_lp(relaxed_m);
    const auto exact = lp::solve_bnb(strict_m);
    ASSERT_EQ(relaxed.status, SolveStatus::Optimal);
    ASSERT_EQ(exact.status, SolveStatus::Optimal);
    EXPECT_TRUE(complementarity_violations(read_csp_flows(strict_m, exact, "csp", T)).empty());
    EXPECT_GE(exact.objective, relaxed.objective - 1e-6 * std::abs(relaxed.objective));
}

TEST(CspFlowBlock, ComplementarityReportListsHours)
{
    CspFlowVars f;
    f.q_cha = {0.0, 5.0, 3.0, 1e-9};
    f.q_dis = {4.0, 0.0, 2.0, 1e-9};
    EXPECT_EQ(complementarity_violations(f), std::vector<int>{3});
}

TEST(CspFlowBlock, RequiresCspSeries)
{
    TimeSeriesBundle b = sunny_bundle(4, 2, 0.5);
    b.has_csp = false;
    try {
        build_csp_flow_block(plant(10.0), 4, b);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::MissingSeries);
    }
}

TEST(CspFlowBlock, EveryRowTagged)
{
    CspFlowOptions opts;
    opts.capacity_var = "cap";
    opts.chp_charge = opts.eb_charge = true;
    CspGroupParams p = plant(10.0);
    p.soc_min_frac = 0.1;
    p.max_build = 100.0;
    opts.strict_complementarity = true;
    const auto blk = build_csp_flow_block(p, 6, sunny_bundle(6, 3, 0.5), opts);
    blk.validate();
    std::vector<std::string> tags;
    for (const auto& [tag, n] : blk.tag_counts())
        tags.push_back(tag);
    for (const char* want : {"htf_node", "sf_capture", "soc_balance", "tes_charge", "tes_discharge", "pb_coupling",
                             "soc_max", "soc_min", "complementarity", "soc_cycle"})
        EXPECT_NE(std::find(tags.begin(), tags.end(), want), tags.end()) << want;
}
