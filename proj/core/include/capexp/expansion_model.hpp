#pragma once

#include <initializer_list>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "capexp/cluster_uc.hpp"
#include "capexp/csp_thermal.hpp"
#include "capexp/data_ingest.hpp"
#include "capexp/lp_model.hpp"
#include "capexp/unit_models.hpp"

namespace capexp {

enum class Tech { Coal, Wind, Pv, Chp, Csp, Eb };

inline constexpr Tech kAllTechs[] = {Tech::Coal, Tech::Wind, Tech::Pv, Tech::Chp, Tech::Csp, Tech::Eb};

std::string_view to_string(Tech tech);
std::optional<Tech> parse_tech(std::string_view name);

/// Bit set over Tech.
class TechSet {
public:
    TechSet() = default;
    TechSet(std::initializer_list<Tech> techs);

    bool has(Tech t) const { return (bits_ >> static_cast<unsigned>(t)) & 1u; }
    void add(Tech t) { bits_ |= 1u << static_cast<unsigned>(t); }
    void remove(Tech t) { bits_ &= ~(1u << static_cast<unsigned>(t)); }
    bool empty() const { return bits_ == 0; }
    std::vector<Tech> list() const;

    bool operator==(const TechSet&) const = default;

private:
    unsigned bits_ = 0;
};

struct ScenarioSpec {
    std::string scenario_id;
    TechSet enabled_techs;
    // NaN keeps the library's policy value.
    double rps_fraction = std::numeric_limits<double>::quiet_NaN();
    bool rps_annual = false;  // one annual-share row instead of one per hour
    std::string overrides_json;  // applied to a copy of the library, may be empty
    int horizon = 0;             // hours; 0 = whole bundle
    // Share of each existing thermal fleet online before hour 1, at minimum output.
    double initial_online_frac = 1.0;
    bool strict_complementarity = false;

    /// Throws Error(InvalidParams).
    void validate() const;
};

/// Objective split; capacity terms are prorated to the modeled horizon.
struct CostComponents {
    double coal = 0.0;
    double wind = 0.0;
    double pv = 0.0;
    double csp = 0.0;
    double chp = 0.0;
    double eb = 0.0;
    double curtailment = 0.0;

    double total() const { return coal + wind + pv + csp + chp + eb + curtailment; }
};

/// The assembled LP with the inputs it was built from. Column names are the
/// symbol registry: every column is reachable by its name and vice versa.
struct ExpansionModel {
    lp::LpModel lp;
    ScenarioSpec spec;
    ParameterLibrary library;  // after overrides and the scenario's RPS
    TimeSeriesBundle bundle;   // trimmed to the horizon
    int T = 0;
    double capacity_scale = 1.0;  // horizon hours / 8760

    int column(const std::string& name) const;  // throws Error(UnknownColumn)
    std::optional<int> find(const std::string& name) const { return lp.find_col(name); }
};

/// Factor converting annual capacity costs to a horizon of T steps of dt_h.
double capacity_cost_scale(int T, double dt_h);

ExpansionModel build_model(const ScenarioSpec& spec, const TimeSeriesBundle& bundle,
                           const ParameterLibrary& library);

struct CapacityPlan {
    std::string tech;
    std::string group;
    double existing = 0.0;
    double built = 0.0;
    double total = 0.0;
};

struct GroupDispatch {
    std::string group;
    std::vector<double> power;  // P per hour
    std::vector<double> heat;   // CHP only
    std::vector<double> heat_curtailed;  // CHP only
    ClusterState state;
};

struct PlanSolution {
    lp::SolveStatus status = lp::SolveStatus::Infeasible;
    double objective = 0.0;
    CostComponents costs;
    std::vector<CapacityPlan> capacities;
    std::vector<GroupDispatch> coal, chp, csp;
    std::vector<CspFlowVars> csp_flows;
    std::vector<double> wind, pv;                    // dispatched
    std::vector<double> wind_available, pv_available;  // cf · installed
    std::vector<double> eb_power, eb_heat, eb_to_tes;
    double power_balance_residual = 0.0;  // max relative over hours
    double heat_balance_residual = 0.0;

    const CapacityPlan* capacity(std::string_view tech, std::string_view group) const;
    /// Hourly total over the groups of one technology.
    std::vector<double> total_power(Tech tech) const;
    std::vector<double> renewable_output() const;  // wind + pv + csp
};

/// Maps the solved columns back to the plan and recomputes each cost
/// component from the primal values. Throws Error(StatusNotOptimal) unless
/// the status is Optimal or Feasible, and Error(ResidualTooLarge) when a
/// balance row is off by more than tol relative to demand or the component
/// sum misses the objective by more than tol relative.
PlanSolution extract_solution(const ExpansionModel& model, const lp::Solution& raw, double tol = 1e-6);

}  // namespace capexp
