#pragma once

#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace capexp {

inline constexpr double kUnlimited = std::numeric_limits<double>::infinity();

// Capacities are MW (electric unless noted), costs are currency/MW-yr for
// capacity terms, currency/MWh for energy terms, currency/MW for starts.

struct CoalGroupParams {
    std::string group_id;
    double existing_capacity = 0.0;
    double unit_size = 200.0;
    double min_output_frac = 0.5;
    double max_output_frac = 1.0;
    double ramp_frac_per_h = 0.35;
    int min_up_h = 8;
    int min_down_h = 4;
    double capex_annualized = 0.0;
    double fixed_om = 0.0;
    double fuel_use_g_per_kwh = 345.0;
    double fuel_cost = 0.0;
    double startup_cost = 0.0;
    double reserve_credit_frac = 1.0;
    double carbon_factor = 0.0;  // tCO2/MWh
    double max_build = kUnlimited;

    void validate() const;  // Throws Error(InvalidParams)
};

/// Electric output P and heat Q share one operating polygon. p_max is the
/// condensing-mode electric maximum of a reference unit; every bound scales
/// with online capacity / p_max. c_u is kept for completeness but no
/// constraint uses it.
struct ChpGroupParams {
    std::string group_id;
    double existing_capacity = 0.0;
    double unit_size = 200.0;
    double min_output_frac = 0.6;
    double max_output_frac = 0.9;
    double ramp_frac_per_h = 0.30;
    int min_up_h = 8;
    int min_down_h = 4;
    double capex_annualized = 0.0;
    double fixed_om = 0.0;
    double fuel_use_g_per_kwh = 370.0;
    double fuel_cost = 0.0;
    double startup_cost = 0.0;
    double reserve_credit_frac = 0.9;
    double carbon_factor = 0.0;
    double max_build = kUnlimited;
    double c_v = 0.15;
    double c_u = 0.75;
    double c_m = 0.5;
    double heat_min = 0.0;
    double heat_max = 200.0;
    double p_min = 120.0;
    double p_max = 200.0;

    void validate() const;
};

struct CspGroupParams {
    std::string group_id;
    double existing_capacity = 0.0;
    double unit_size = 100.0;
    double min_output_frac = 0.15;
    double max_output_frac = 1.0;
    double ramp_frac_per_h = 0.30;
    int min_up_h = 2;
    int min_down_h = 2;
    double eta_sf = 0.37;
    double eta_tes_cha = 0.98;
    double eta_tes_dis = 0.98;
    double eta_pb = 0.40;
    double tes_loss_frac_per_h = 0.00031;
    double storage_hours = 10.0;
    double soc_min_frac = 0.0;
    double solar_multiple = 2.4;
    double dni_design = 0.95;  // kW/m^2
    double tes_power_rating = kUnlimited;  // MW-th cap on charge and discharge
    double capex_annualized = 0.0;
    double fixed_om = 0.0;
    double max_build = kUnlimited;

    void validate() const;
};

struct EbParams {
    double existing_capacity = 0.0;
    double eta_eb = 0.87;
    double heat_out_min = 0.0;
    double heat_out_max_frac = 1.0;  // of installed electric capacity
    double capex_annualized = 0.0;
    double fixed_om = 0.0;
    double var_cost = 0.0;
    double max_build = kUnlimited;

    void validate() const;
};

enum class VreTech { Wind, Pv };

struct VreParams {
    VreTech tech = VreTech::Wind;
    double existing_capacity = 0.0;
    double capex_annualized = 0.0;
    double fixed_om = 0.0;
    double max_build = kUnlimited;

    void validate() const;
};

/// A negative carbon factor means "use each group's own factor".
struct PolicySet {
    double rps_fraction = 0.65;
    double curtail_penalty = 20.0;
    double carbon_factor_coal = -1.0;
    double carbon_factor_chp = -1.0;
    double discount_rate = 0.07;
    double reserve_demand_frac = 0.05;
    double reserve_err_wind = 0.10;
    double reserve_err_pv = 0.10;
    double reserve_err_csp = 0.05;

    void validate() const;
};

struct ParameterLibrary {
    std::vector<CoalGroupParams> coal;
    std::vector<ChpGroupParams> chp;
    std::vector<CspGroupParams> csp;
    EbParams eb;
    VreParams wind{VreTech::Wind};
    VreParams pv{VreTech::Pv};
    PolicySet policy;
    double coal_price_per_ton = 37.7;
    double gas_price_per_m3 = 0.1691;  // no gas technology uses it

    void validate() const;
};

/// Capital recovery: overnight · r(1+r)^n / ((1+r)^n - 1), or overnight / n
/// at r = 0. Throws Error(InvalidParams) when lifetime < 1 or r < 0.
double annualize_capex(double overnight_cost, double lifetime_years, double r);

/// Fuel cost in currency/MWh from specific coal use and coal price.
double coal_fuel_cost(double fuel_use_g_per_kwh, double price_per_ton);

/// tCO2/MWh at 2.64 t CO2 per t of coal burned.
double coal_carbon_factor(double fuel_use_g_per_kwh);

/// Three coal and three CHP size classes, one CSP group, EB, wind and PV with
/// capital costs annualized at the library discount rate.
ParameterLibrary default_parameter_library();

/// Membership of (p, q) in the CHP operating polygon scaled to online_cap.
/// Throws Error(InvalidParams) on c_v < 0, inverted bounds or online_cap <= 0.
bool chp_feasible(double p, double q, const ChpGroupParams& params, double online_cap);

/// Applies a JSON override document (schema in README) to the library and
/// revalidates it. Unknown sections or fields raise Error(InvalidParams).
void apply_overrides(ParameterLibrary& library, std::string_view json_text);

/// Full parameter dump in the override schema, stable key order.
std::string library_to_json(const ParameterLibrary& library);

}  // namespace capexp
