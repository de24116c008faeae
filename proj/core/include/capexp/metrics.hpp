#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "capexp/data_ingest.hpp"
#include "capexp/expansion_model.hpp"
#include "capexp/unit_models.hpp"

namespace capexp {

struct CurtailmentStats {
    double curtailed = 0.0;  // MWh
    double available = 0.0;  // MWh
    double rate = 0.0;       // curtailed / available
    bool zero_denominator = false;  // no VRE available; rate reported as 0
};

/// Sum over hours of available minus dispatched over the sum of available,
/// for any number of (available, dispatched) series pairs of equal length.
CurtailmentStats curtailment_rate(std::span<const std::vector<double>> available,
                                  std::span<const std::vector<double>> dispatched, double dt = 1.0);
CurtailmentStats curtailment_rate(const PlanSolution& sol, double dt = 1.0);

struct CarbonReport {
    std::vector<double> hourly;   // tCO2 per step
    std::vector<double> monthly;  // calendar months for 8760 h, else 730 h blocks
    double total = 0.0;
};

/// Effective coal and CHP factors: the policy value when >= 0, otherwise
/// the group's own.
double coal_factor(const PolicySet& policy, const CoalGroupParams& g);
double chp_factor(const PolicySet& policy, const ChpGroupParams& g);

/// Coal output and CHP fuel-equivalent output (P + c_v Q) times their
/// factors, per step of dt hours.
CarbonReport carbon_emissions(const PlanSolution& sol, const ParameterLibrary& library, double dt = 1.0);

/// Hour index boundaries of the monthly aggregation for a horizon.
std::vector<int> month_starts(int T);

struct YearCost {
    double investment = 0.0;
    double maintenance = 0.0;
    double operation = 0.0;
};

struct YearEnergy {
    double electric = 0.0;  // same unit the result is expressed per
    double heat = 0.0;
};

/// Discounted cost over discounted energy, years counted from 1. Throws
/// Error(ValidationError) on mismatched lengths or r < 0 and
/// Error(ZeroEnergy) when discounted energy is not positive.
double lcoe(std::span<const YearCost> costs, std::span<const YearEnergy> energy, double r);

struct PeakValley {
    double difference = 0.0;  // MW
    double rate = 0.0;        // difference / peak net load
    double peak = 0.0;
    double valley = 0.0;
};

/// Net load D_E - P_w - P_s. CSP and EB are treated as flexible resources
/// and stay out of the net load.
std::vector<double> net_load(const PlanSolution& sol, const TimeSeriesBundle& bundle);
PeakValley peak_valley(std::span<const double> net_load);
PeakValley peak_valley(const PlanSolution& sol, const TimeSeriesBundle& bundle);

/// Area of the triangle drawn on three axes 120 degrees apart. Throws
/// Error(NonPositiveIndex) unless all three are positive and finite.
double benefit_triangle(double cost_norm, double pv_norm, double curt_norm);

struct TechLcoe {
    std::string tech;
    std::optional<double> per_kwh;  // empty when the technology produced nothing
};

struct MetricsReport {
    std::string scenario_id;
    double objective = 0.0;
    CostComponents costs;
    CurtailmentStats curtailment;
    CarbonReport carbon;
    std::vector<TechLcoe> lcoe_per_tech;
    PeakValley peak_valley;
    double renewable_share = 0.0;  // renewable energy over electric demand
    int complementarity_hours = 0;  // hours with simultaneous TES charge and discharge
    // Filled by compare_scenarios; empty for a lone report.
    std::optional<double> benefit_triangle_area;
};

/// All indexes for one solved scenario. LCOE per technology is the
/// horizon's cost of that technology over its electric plus heat output,
/// with no share of the curtailment penalty.
MetricsReport compute_metrics(const ExpansionModel& model, const PlanSolution& sol);

/// Stable JSON (sorted keys, full precision).
std::string metrics_to_json(const MetricsReport& report);

}  // namespace capexp
