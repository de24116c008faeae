#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "capexp/data_ingest.hpp"
#include "capexp/lp_model.hpp"
#include "capexp/uc_block.hpp"
#include "capexp/unit_models.hpp"

namespace capexp {

/// Hourly thermal flows of one CSP group, MW-th except soc (MWh-th).
/// soc has T + 1 entries, soc[0] being the free initial level.
struct CspFlowVars {
    std::vector<double> q_sf_htf;
    std::vector<double> q_tes_htf;
    std::vector<double> q_htf_tes;
    std::vector<double> q_htf_pb;
    std::vector<double> q_cur;
    std::vector<double> soc;
    std::vector<double> q_cha;
    std::vector<double> q_dis;
    std::vector<double> q_tes_hd;
    std::vector<double> q_chp_to_tes;
    std::vector<double> q_eb_to_tes;
};

/// eta_sf · area · dni, converted from kW to MW-th.
double sf_thermal_input(double s_sf_m2, double dni_kw_m2, double eta_sf);

/// One hour of the storage balance: (1 - gamma·dt)·prev + (cha - dis)·dt.
double step_tes_soc(double prev, double cha, double dis, double gamma, double dt);

/// Extra output the plant could still deliver against a supply shortfall:
/// the smaller of the headroom cap - p and the shortfall. Throws
/// Error(InvalidState) when p > cap or an argument is negative.
double emergency_reserve(double p_csp, double cap_csp, double shortfall);

/// Solar field area sized so that the field delivers solar_multiple times
/// the power block's rated thermal input at design DNI.
double solar_field_area(const CspGroupParams& params, double capacity_mw);

/// Storage capacity in MWh-th: storage_hours of rated power block input.
double tes_capacity(const CspGroupParams& params, double capacity_mw);

struct CspFlowOptions {
    // External column holding the group capacity (expansion mode); without
    // it the capacity is params.existing_capacity.
    std::optional<std::string> capacity_var;
    std::string output_symbol = "P_csp";  // external electric output column
    bool chp_charge = false;  // create q_chp_to_tes columns
    bool eb_charge = false;   // create q_eb_to_tes columns
    // One binary per hour forbidding simultaneous charge and discharge.
    bool strict_complementarity = false;
    // Big-M for the strict rows; NaN means tes_power_rating, then the
    // storage turnover of the largest buildable capacity.
    double big_m = std::numeric_limits<double>::quiet_NaN();
};

/// Solar field, heat transfer node, storage and power block rows for
/// hours 1..T. Names follow uc_name(symbol, group, t); soc runs from t = 0.
/// Throws Error(MissingSeries) when the bundle carries no CSP data,
/// Error(InvalidParams) on bad sizes or an unresolvable big-M.
UnitCommitmentBlock build_csp_flow_block(const CspGroupParams& params, int T, const TimeSeriesBundle& bundle,
                                         const CspFlowOptions& options = {});

/// Column values of a merged block, by name. Missing optional inflow
/// columns read as zero.
CspFlowVars read_csp_flows(const lp::LpModel& model, const lp::Solution& sol, const std::string& group, int T);

/// 1-based hours whose charge and discharge both exceed tol.
std::vector<int> complementarity_violations(const CspFlowVars& flows, double tol = 1e-6);

struct CspBalanceCheck {
    double htf_residual = 0.0;  // max relative node imbalance
    double soc_residual = 0.0;  // max relative gap to the replayed trajectory
    double periodicity_gap = 0.0;  // |soc[T] - soc[0]|
};

/// Replays the storage trajectory from soc[0] with step_tes_soc and checks
/// the node balance, both relative to max(1, magnitude).
CspBalanceCheck check_csp_balances(const CspFlowVars& flows, const CspGroupParams& params, double dt);

}  // namespace capexp
