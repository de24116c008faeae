#include "capexp/unit_models.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <variant>

#include "capexp/error.hpp"
#include "json.hpp"

namespace capexp {

namespace {

using Json = nlohmann::ordered_json;

void require(bool ok, std::string_view who, std::string_view what)
{
    if (!ok)
        throw Error(ErrorKind::InvalidParams, fmt::format("{}: {}", who, what));
}

bool is_fraction(double v) { return v >= 0.0 && v <= 1.0; }
bool nonneg(double v) { return v >= 0.0; }  // false for NaN

template <class G>
void validate_commitment(const G& g, std::string_view who)
{
    require(nonneg(g.existing_capacity), who, "existing_capacity must be >= 0");
    require(g.unit_size > 0.0, who, "unit_size must be > 0");
    require(is_fraction(g.min_output_frac) && is_fraction(g.max_output_frac) &&
                g.min_output_frac <= g.max_output_frac,
            who, "need 0 <= min_output_frac <= max_output_frac <= 1");
    require(nonneg(g.ramp_frac_per_h), who, "ramp_frac_per_h must be >= 0");
    require(g.min_up_h >= 1 && g.min_down_h >= 1, who, "min up/down times must be >= 1 h");
    require(nonneg(g.capex_annualized) && nonneg(g.fixed_om), who, "costs must be >= 0");
    require(nonneg(g.max_build), who, "max_build must be >= 0");
}

// ---- JSON field tables ----------------------------------------------------

template <class T>
struct Field {
    const char* name;
    std::variant<double T::*, int T::*, std::string T::*> member;
};

#define CAPEXP_F(T, m) Field<T>{#m, &T::m}

const std::vector<Field<CoalGroupParams>>& fields(const CoalGroupParams*)
{
    using T = CoalGroupParams;
    static const std::vector<Field<T>> f = {
        CAPEXP_F(T, group_id),         CAPEXP_F(T, existing_capacity),  CAPEXP_F(T, unit_size),
        CAPEXP_F(T, min_output_frac),  CAPEXP_F(T, max_output_frac),    CAPEXP_F(T, ramp_frac_per_h),
        CAPEXP_F(T, min_up_h),         CAPEXP_F(T, min_down_h),         CAPEXP_F(T, capex_annualized),
        CAPEXP_F(T, fixed_om),         CAPEXP_F(T, fuel_use_g_per_kwh), CAPEXP_F(T, fuel_cost),
        CAPEXP_F(T, startup_cost),     CAPEXP_F(T, reserve_credit_frac), CAPEXP_F(T, carbon_factor),
        CAPEXP_F(T, max_build)};
    return f;
}

const std::vector<Field<ChpGroupParams>>& fields(const ChpGroupParams*)
{
    using T = ChpGroupParams;
    static const std::vector<Field<T>> f = {
        CAPEXP_F(T, group_id),         CAPEXP_F(T, existing_capacity),  CAPEXP_F(T, unit_size),
        CAPEXP_F(T, min_output_frac),  CAPEXP_F(T, max_output_frac),    CAPEXP_F(T, ramp_frac_per_h),
        CAPEXP_F(T, min_up_h),         CAPEXP_F(T, min_down_h),         CAPEXP_F(T, capex_annualized),
        CAPEXP_F(T, fixed_om),         CAPEXP_F(T, fuel_use_g_per_kwh), CAPEXP_F(T, fuel_cost),
        CAPEXP_F(T, startup_cost),     CAPEXP_F(T, reserve_credit_frac), CAPEXP_F(T, carbon_factor),
        CAPEXP_F(T, max_build),        CAPEXP_F(T, c_v),                CAPEXP_F(T, c_u),
        CAPEXP_F(T, c_m),              CAPEXP_F(T, heat_min),           CAPEXP_F(T, heat_max),
        CAPEXP_F(T, p_min),            CAPEXP_F(T, p_max)};
    return f;
}

const std::vector<Field<CspGroupParams>>& fields(const CspGroupParams*)
{
    using T = CspGroupParams;
    static const std::vector<Field<T>> f = {
        CAPEXP_F(T, group_id),         CAPEXP_F(T, existing_capacity),   CAPEXP_F(T, unit_size),
        CAPEXP_F(T, min_output_frac),  CAPEXP_F(T, max_output_frac),     CAPEXP_F(T, ramp_frac_per_h),
        CAPEXP_F(T, min_up_h),         CAPEXP_F(T, min_down_h),          CAPEXP_F(T, eta_sf),
        CAPEXP_F(T, eta_tes_cha),      CAPEXP_F(T, eta_tes_dis),         CAPEXP_F(T, eta_pb),
        CAPEXP_F(T, tes_loss_frac_per_h), CAPEXP_F(T, storage_hours),    CAPEXP_F(T, soc_min_frac),
        CAPEXP_F(T, solar_multiple),   CAPEXP_F(T, dni_design),          CAPEXP_F(T, tes_power_rating),
        CAPEXP_F(T, capex_annualized), CAPEXP_F(T, fixed_om),            CAPEXP_F(T, max_build)};
    return f;
}

const std::vector<Field<EbParams>>& fields(const EbParams*)
{
    using T = EbParams;
    static const std::vector<Field<T>> f = {
        CAPEXP_F(T, existing_capacity), CAPEXP_F(T, eta_eb),   CAPEXP_F(T, heat_out_min),
        CAPEXP_F(T, heat_out_max_frac), CAPEXP_F(T, capex_annualized), CAPEXP_F(T, fixed_om),
        CAPEXP_F(T, var_cost),          CAPEXP_F(T, max_build)};
    return f;
}

const std::vector<Field<VreParams>>& fields(const VreParams*)
{
    using T = VreParams;
    static const std::vector<Field<T>> f = {CAPEXP_F(T, existing_capacity), CAPEXP_F(T, capex_annualized),
                                             CAPEXP_F(T, fixed_om), CAPEXP_F(T, max_build)};
    return f;
}

const std::vector<Field<PolicySet>>& fields(const PolicySet*)
{
    using T = PolicySet;
    static const std::vector<Field<T>> f = {
        CAPEXP_F(T, rps_fraction),       CAPEXP_F(T, curtail_penalty), CAPEXP_F(T, carbon_factor_coal),
        CAPEXP_F(T, carbon_factor_chp),  CAPEXP_F(T, discount_rate),   CAPEXP_F(T, reserve_demand_frac),
        CAPEXP_F(T, reserve_err_wind),   CAPEXP_F(T, reserve_err_pv),  CAPEXP_F(T, reserve_err_csp)};
    return f;
}

#undef CAPEXP_F

// Infinite values travel as JSON null.
Json number_to_json(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double json_to_number(const Json& j, std::string_view where)
{
    if (j.is_null())
        return kUnlimited;
    if (!j.is_number())
        throw Error(ErrorKind::InvalidParams, fmt::format("{}: expected a number", where));
    return j.get<double>();
}

template <class T>
Json to_json(const T& obj)
{
    Json out = Json::object();
    for (const auto& f : fields(static_cast<const T*>(nullptr))) {
        std::visit(
            [&](auto member) {
                using M = std::remove_cvref_t<decltype(obj.*member)>;
                if constexpr (std::is_same_v<M, double>)
                    out[f.name] = number_to_json(obj.*member);
                else
                    out[f.name] = obj.*member;
            },
            f.member);
    }
    return out;
}

template <class T>
void merge(T& obj, const Json& patch, std::string_view where)
{
    if (!patch.is_object())
        throw Error(ErrorKind::InvalidParams, fmt::format("{}: expected an object", where));
    const auto& table = fields(static_cast<const T*>(nullptr));
    for (const auto& [key, value] : patch.items()) {
        const auto it = std::find_if(table.begin(), table.end(), [&](const auto& f) { return key == f.name; });
        if (it == table.end())
            throw Error(ErrorKind::InvalidParams, fmt::format("{}: unknown field '{}'", where, key));
        const std::string here = fmt::format("{}.{}", where, key);
        std::visit(
            [&](auto member) {
                using M = std::remove_cvref_t<decltype(obj.*member)>;
                if constexpr (std::is_same_v<M, double>) {
                    obj.*member = json_to_number(value, here);
                } else if constexpr (std::is_same_v<M, int>) {
                    if (!value.is_number_integer())
                        throw Error(ErrorKind::InvalidParams, here + ": expected an integer");
                    obj.*member = value.template get<int>();
                } else {
                    if (!value.is_string())
                        throw Error(ErrorKind::InvalidParams, here + ": expected a string");
                    obj.*member = value.template get<std::string>();
                }
            },
            it->member);
    }
}

// An array replaces the group list; an object patches groups by id ("*" = all).
template <class G>
void merge_groups(std::vector<G>& groups, const Json& patch, std::string_view section)
{
    if (patch.is_array()) {
        std::vector<G> fresh;
        for (std::size_t k = 0; k < patch.size(); ++k) {
            G g;
            merge(g, patch[k], fmt::format("{}[{}]", section, k));
            fresh.push_back(std::move(g));
        }
        groups = std::move(fresh);
        return;
    }
    if (!patch.is_object())
        throw Error(ErrorKind::InvalidParams, fmt::format("{}: expected an array or object", section));
    for (const auto& [id, body] : patch.items()) {
        bool hit = false;
        for (G& g : groups) {
            if (id == "*" || g.group_id == id) {
                merge(g, body, fmt::format("{}.{}", section, id));
                hit = true;
            }
        }
        if (!hit)
            throw Error(ErrorKind::InvalidParams, fmt::format("{}: no group '{}'", section, id));
    }
}

template <class G>
Json groups_to_json(const std::vector<G>& groups)
{
    Json arr = Json::array();
    for (const G& g : groups)
        arr.push_back(to_json(g));
    return arr;
}

template <class G>
void validate_ids(const std::vector<G>& groups, std::string_view section)
{
    for (std::size_t a = 0; a < groups.size(); ++a) {
        require(!groups[a].group_id.empty(), section, "group_id must not be empty");
        for (std::size_t b = 0; b < a; ++b)
            require(groups[a].group_id != groups[b].group_id, section,
                    fmt::format("duplicate group_id '{}'", groups[a].group_id));
    }
}

}  // namespace

void CoalGroupParams::validate() const
{
    const std::string who = "coal group '" + group_id + "'";
    validate_commitment(*this, who);
    require(nonneg(fuel_cost) && nonneg(startup_cost), who, "costs must be >= 0");
    require(is_fraction(reserve_credit_frac), who, "reserve_credit_frac must lie in [0,1]");
    require(nonneg(carbon_factor) && nonneg(fuel_use_g_per_kwh), who, "fuel use and carbon factor must be >= 0");
}

void ChpGroupParams::validate() const
{
    const std::string who = "CHP group '" + group_id + "'";
    validate_commitment(*this, who);
    require(nonneg(fuel_cost) && nonneg(startup_cost), who, "costs must be >= 0");
    require(is_fraction(reserve_credit_frac), who, "reserve_credit_frac must lie in [0,1]");
    require(nonneg(carbon_factor) && nonneg(fuel_use_g_per_kwh), who, "fuel use and carbon factor must be >= 0");
    require(nonneg(c_v) && nonneg(c_m), who, "c_v and c_m must be >= 0");
    require(nonneg(heat_min) && heat_min <= heat_max, who, "need 0 <= heat_min <= heat_max");
    require(nonneg(p_min) && p_min <= p_max && p_max > 0.0, who, "need 0 <= p_min <= p_max, p_max > 0");
}

void CspGroupParams::validate() const
{
    const std::string who = "CSP group '" + group_id + "'";
    validate_commitment(*this, who);
    for (double eta : {eta_sf, eta_tes_cha, eta_tes_dis, eta_pb})
        require(eta > 0.0 && eta <= 1.0, who, "efficiencies must lie in (0,1]");
    require(tes_loss_frac_per_h >= 0.0 && tes_loss_frac_per_h < 1.0, who, "tes_loss_frac_per_h must lie in [0,1)");
    require(nonneg(storage_hours), who, "storage_hours must be >= 0");
    require(is_fraction(soc_min_frac), who, "soc_min_frac must lie in [0,1]");
    require(solar_multiple >= 1.0, who, "solar_multiple must be >= 1");
    require(dni_design > 0.0, who, "dni_design must be > 0");
    require(tes_power_rating > 0.0, who, "tes_power_rating must be > 0");
}

void EbParams::validate() const
{
    require(nonneg(existing_capacity), "EB", "existing_capacity must be >= 0");
    require(eta_eb > 0.0 && eta_eb <= 1.0, "EB", "eta_eb must lie in (0,1]");
    require(nonneg(heat_out_min) && nonneg(heat_out_max_frac), "EB", "heat output bounds must be >= 0");
    require(nonneg(capex_annualized) && nonneg(fixed_om) && nonneg(var_cost), "EB", "costs must be >= 0");
    require(nonneg(max_build), "EB", "max_build must be >= 0");
}

void VreParams::validate() const
{
    const char* who = tech == VreTech::Wind ? "wind" : "pv";
    require(nonneg(existing_capacity), who, "existing_capacity must be >= 0");
    require(nonneg(capex_annualized) && nonneg(fixed_om), who, "costs must be >= 0");
    require(nonneg(max_build), who, "max_build must be >= 0");
}

void PolicySet::validate() const
{
    require(is_fraction(rps_fraction), "policy", "rps_fraction must lie in [0,1]");
    for (double v : {curtail_penalty, discount_rate, reserve_demand_frac, reserve_err_wind, reserve_err_pv,
                     reserve_err_csp})
        require(nonneg(v), "policy", "fractions and penalties must be >= 0");
}

void ParameterLibrary::validate() const
{
    validate_ids(coal, "coal");
    validate_ids(chp, "chp");
    validate_ids(csp, "csp");
    for (const auto& g : coal)
        g.validate();
    for (const auto& g : chp)
        g.validate();
    for (const auto& g : csp)
        g.validate();
    eb.validate();
    wind.validate();
    pv.validate();
    policy.validate();
    require(nonneg(coal_price_per_ton), "library", "coal_price_per_ton must be >= 0");
}

double annualize_capex(double overnight_cost, double lifetime_years, double r)
{
    require(lifetime_years >= 1.0, "annualize_capex", "lifetime must be >= 1 year");
    require(r >= 0.0, "annualize_capex", "discount rate must be >= 0");
    if (r == 0.0)
        return overnight_cost / lifetime_years;
    const double g = std::pow(1.0 + r, lifetime_years);
    return overnight_cost * r * g / (g - 1.0);
}

double coal_fuel_cost(double fuel_use_g_per_kwh, double price_per_ton)
{
    // g/kWh -> t/MWh is a factor 1e-3.
    return fuel_use_g_per_kwh * 1e-3 * price_per_ton;
}

double coal_carbon_factor(double fuel_use_g_per_kwh) { return fuel_use_g_per_kwh * 1e-3 * 2.64; }

ParameterLibrary default_parameter_library()
{
    ParameterLibrary lib;
    const double r = lib.policy.discount_rate;
    auto per_mw = [](double usd_per_kw) { return usd_per_kw * 1e3; };

    struct SizeClass {
        const char* name;
        double unit;
        int up, down;
        double coal_fuel, chp_fuel, startup;
    };
    const SizeClass classes[] = {{"small", 200.0, 8, 4, 345.0, 370.0, 40.0},
                                 {"medium", 450.0, 8, 8, 302.0, 320.0, 50.0},
                                 {"large", 800.0, 24, 48, 281.0, 295.0, 60.0}};
    for (const SizeClass& c : classes) {
        CoalGroupParams g;
        g.group_id = std::string("coal_") + c.name;
        g.unit_size = c.unit;
        g.min_up_h = c.up;
        g.min_down_h = c.down;
        g.fuel_use_g_per_kwh = c.coal_fuel;
        g.fuel_cost = coal_fuel_cost(c.coal_fuel, lib.coal_price_per_ton);
        g.carbon_factor = coal_carbon_factor(c.coal_fuel);
        g.startup_cost = c.startup;
        g.capex_annualized = annualize_capex(per_mw(1000.0), 25, r);
        g.fixed_om = per_mw(30.0);
        g.reserve_credit_frac = g.max_output_frac;
        lib.coal.push_back(g);

        ChpGroupParams h;
        h.group_id = std::string("chp_") + c.name;
        h.unit_size = c.unit;
        h.fuel_use_g_per_kwh = c.chp_fuel;
        h.fuel_cost = coal_fuel_cost(c.chp_fuel, lib.coal_price_per_ton);
        h.carbon_factor = coal_carbon_factor(c.chp_fuel);
        h.startup_cost = c.startup;
        h.capex_annualized = annualize_capex(per_mw(1200.0), 25, r);
        h.fixed_om = per_mw(35.0);
        h.reserve_credit_frac = h.max_output_frac;
        h.p_max = c.unit;
        h.p_min = h.min_output_frac * c.unit;
        h.heat_max = c.unit;
        lib.chp.push_back(h);
    }

    CspGroupParams s;
    s.group_id = "csp";
    s.capex_annualized = annualize_capex(per_mw(3500.0), 25, r);
    s.fixed_om = per_mw(60.0);
    lib.csp.push_back(s);

    lib.eb.capex_annualized = annualize_capex(per_mw(100.0), 20, r);
    lib.eb.fixed_om = per_mw(2.0);
    lib.eb.var_cost = 0.5;

    lib.wind.capex_annualized = annualize_capex(per_mw(1200.0), 15, r);
    lib.wind.fixed_om = per_mw(30.0);
    lib.pv.capex_annualized = annualize_capex(per_mw(700.0), 15, r);
    lib.pv.fixed_om = per_mw(15.0);
    return lib;
}

bool chp_feasible(double p, double q, const ChpGroupParams& g, double online_cap)
{
    require(g.c_v >= 0.0, "chp_feasible", "c_v must be >= 0");
    require(g.heat_min <= g.heat_max && g.p_min <= g.p_max && g.p_max > 0.0, "chp_feasible",
            "bounds are inverted");
    require(online_cap > 0.0, "chp_feasible", "online_cap must be > 0");
    const double k = online_cap / g.p_max;
    const double tol = 1e-9 * std::max(1.0, online_cap);
    const double qmax = g.heat_max * k;
    if (q < g.heat_min * k - tol || q > qmax + tol)
        return false;
    const double back_pressure = g.c_m * q - (g.c_m + g.c_v) * qmax + g.p_max * k;
    const double min_line = g.p_min * k - g.c_v * q;
    return p >= std::max(back_pressure, min_line) - tol && p <= g.p_max * k - g.c_v * q + tol;
}

void apply_overrides(ParameterLibrary& lib, std::string_view json_text)
{
    Json doc;
    try {
        doc = Json::parse(json_text);
    } catch (const Json::parse_error& e) {
        throw Error(ErrorKind::InvalidParams, std::string("override document: ") + e.what());
    }
    if (!doc.is_object())
        throw Error(ErrorKind::InvalidParams, "override document must be a JSON object");
    ParameterLibrary next = lib;
    for (const auto& [key, value] : doc.items()) {
        if (key == "coal")
            merge_groups(next.coal, value, key);
        else if (key == "chp")
            merge_groups(next.chp, value, key);
        else if (key == "csp")
            merge_groups(next.csp, value, key);
        else if (key == "eb")
            merge(next.eb, value, key);
        else if (key == "wind")
            merge(next.wind, value, key);
        else if (key == "pv")
            merge(next.pv, value, key);
        else if (key == "policy")
            merge(next.policy, value, key);
        else if (key == "coal_price_per_ton")
            next.coal_price_per_ton = json_to_number(value, key);
        else if (key == "gas_price_per_m3")
            next.gas_price_per_m3 = json_to_number(value, key);
        else
            throw Error(ErrorKind::InvalidParams, fmt::format("unknown section '{}'", key));
    }
    next.validate();
    lib = std::move(next);
}

std::string library_to_json(const ParameterLibrary& lib)
{
    Json doc = Json::object();
    doc["coal"] = groups_to_json(lib.coal);
    doc["chp"] = groups_to_json(lib.chp);
    doc["csp"] = groups_to_json(lib.csp);
    doc["eb"] = to_json(lib.eb);
    doc["wind"] = to_json(lib.wind);
    doc["pv"] = to_json(lib.pv);
    doc["policy"] = to_json(lib.policy);
    doc["coal_price_per_ton"] = lib.coal_price_per_ton;
    doc["gas_price_per_m3"] = lib.gas_price_per_m3;
    return doc.dump(2);
}

}  // namespace capexp
