#include "capexp/scenario.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "capexp/branch_and_bound.hpp"
#include "capexp/error.hpp"
#include "capexp/mps.hpp"
#include "capexp/solution_io.hpp"
#include "capexp/toy_instance.hpp"
#include "json.hpp"

namespace capexp {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kToyHorizon = 168;

const TechSet kBaseTechs{Tech::Coal, Tech::Wind, Tech::Pv, Tech::Chp};
const TechSet kCspTechs{Tech::Coal, Tech::Wind, Tech::Pv, Tech::Chp, Tech::Csp};
const TechSet kAllTechSet{Tech::Coal, Tech::Wind, Tech::Pv, Tech::Chp, Tech::Csp, Tech::Eb};

std::string csp_patch(const char* field, double value)
{
    json doc;
    doc["csp"]["*"][field] = value;
    return doc.dump();
}

// Later documents win; arrays replace wholesale, like apply_overrides.
std::string merge_overrides(const std::string& first, const std::string& second)
{
    if (first.empty())
        return second;
    if (second.empty())
        return first;
    json a = json::parse(first);
    a.merge_patch(json::parse(second));
    return a.dump();
}

std::string read_text(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::IoError, fmt::format("cannot open '{}'", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorKind::IoError, fmt::format("cannot write '{}'", path.string()));
    out << text;
}

json techs_json(const TechSet& techs)
{
    json arr = json::array();
    for (Tech t : techs.list())
        arr.push_back(std::string(to_string(t)));
    return arr;
}

TechSet parse_techs(const json& arr)
{
    if (!arr.is_array())
        throw Error(ErrorKind::ValidationError, "techs must be an array of names");
    TechSet set;
    for (const auto& v : arr) {
        const auto t = parse_tech(v.get<std::string>());
        if (!t)
            throw Error(ErrorKind::ValidationError, fmt::format("unknown technology '{}'", v.get<std::string>()));
        set.add(*t);
    }
    return set;
}

std::string overrides_text(const json& v)
{
    if (v.is_null())
        return {};
    if (v.is_string())
        return v.get<std::string>();
    return v.dump();
}

fs::path resolve(const fs::path& base, const std::string& p)
{
    if (p.empty())
        return {};
    fs::path path(p);
    return path.is_relative() && !base.empty() ? base / path : path;
}

// Negative zero from the solver prints as 0.
std::string num(double v) { return fmt::format("{}", v == 0.0 ? 0.0 : v); }

void write_capacities(const fs::path& path, const PlanSolution& plan)
{
    std::string s = "tech,group,existing_mw,built_mw,total_mw\n";
    for (const auto& c : plan.capacities)
        s += fmt::format("{},{},{},{},{}\n", c.tech, c.group, num(c.existing), num(c.built), num(c.total));
    write_text(path, s);
}

// One column per series, one row per hour.
void write_columns(const fs::path& path, const std::vector<std::string>& names,
                   const std::vector<const std::vector<double>*>& cols, int T)
{
    std::string s = "hour";
    for (const auto& n : names)
        s += "," + n;
    s += "\n";
    for (int t = 0; t < T; ++t) {
        s += std::to_string(t + 1);
        for (const auto* c : cols)
            s += "," + num(c->at(t));
        s += "\n";
    }
    write_text(path, s);
}

void write_group_dispatch(const fs::path& path, const std::vector<GroupDispatch>& groups, bool heat, int T)
{
    std::vector<std::string> names;
    std::vector<const std::vector<double>*> cols;
    for (const auto& g : groups) {
        names.push_back(g.group + ":power_mw");
        cols.push_back(&g.power);
        if (heat) {
            names.push_back(g.group + ":heat_mw");
            cols.push_back(&g.heat);
            names.push_back(g.group + ":heat_curtailed_mw");
            cols.push_back(&g.heat_curtailed);
        }
        names.push_back(g.group + ":online_mw");
        cols.push_back(&g.state.online_cap);
    }
    write_columns(path, names, cols, T);
}

void write_outputs(const fs::path& dir, const ExpansionModel& em, const PlanSolution& plan,
                   const MetricsReport& metrics)
{
    const int T = em.T;
    const TechSet& on = em.spec.enabled_techs;
    write_capacities(dir / "capacities.csv", plan);
    if (on.has(Tech::Coal))
        write_group_dispatch(dir / "dispatch_coal.csv", plan.coal, false, T);
    if (on.has(Tech::Chp))
        write_group_dispatch(dir / "dispatch_chp.csv", plan.chp, true, T);
    if (on.has(Tech::Csp))
        write_group_dispatch(dir / "dispatch_csp.csv", plan.csp, false, T);
    if (on.has(Tech::Wind))
        write_columns(dir / "dispatch_wind.csv", {"dispatched_mw", "available_mw"},
                      {&plan.wind, &plan.wind_available}, T);
    if (on.has(Tech::Pv))
        write_columns(dir / "dispatch_pv.csv", {"dispatched_mw", "available_mw"}, {&plan.pv, &plan.pv_available},
                      T);
    if (on.has(Tech::Eb))
        write_columns(dir / "dispatch_eb.csv", {"power_mw", "heat_mw", "heat_to_tes_mw"},
                      {&plan.eb_power, &plan.eb_heat, &plan.eb_to_tes}, T);
    if (on.has(Tech::Csp)) {
        // soc has T+1 entries; hour 0 is the initial level.
        std::string s = "hour";
        for (const auto& g : em.library.csp)
            s += "," + g.group_id + ":soc_mwh";
        s += "\n";
        for (int t = 0; t <= T; ++t) {
            s += std::to_string(t);
            for (const auto& f : plan.csp_flows)
                s += "," + num(f.soc.at(t));
            s += "\n";
        }
        write_text(dir / "tes_soc.csv", s);
    }
    write_text(dir / "metrics.json", metrics_to_json(metrics) + "\n");
}

std::string manifest_json(const RunConfig& cfg, const ScenarioInputs& inputs, const ExpansionModel& em,
                          const std::string& id, std::string_view status, double objective, long iterations,
                          long nodes)
{
    json doc;
    doc["scenario"] = id;
    doc["config"] = json::parse(run_config_to_json(cfg));
    doc["inputs"] = {{"bundle_hash", inputs.bundle_hash},
                     {"params_hash", inputs.params_hash},
                     {"horizon_hours", em.T},
                     {"dt_hours", em.bundle.dt_hours}};
    doc["spec"] = {{"techs", techs_json(em.spec.enabled_techs)},
                   {"rps_fraction", em.library.policy.rps_fraction},
                   {"rps_annual", em.spec.rps_annual},
                   {"strict_complementarity", em.spec.strict_complementarity},
                   {"initial_online_frac", em.spec.initial_online_frac},
                   {"overrides", em.spec.overrides_json}};
    doc["model"] = {{"rows", em.lp.num_rows()},
                    {"cols", em.lp.num_cols()},
                    {"nonzeros", em.lp.num_nonzeros()},
                    {"binaries", em.lp.num_binaries()}};
    doc["solver"] = {{"mode", std::string(to_string(cfg.mode))},
                     {"status", std::string(status)},
                     {"objective", std::isfinite(objective) ? json(objective) : json(nullptr)},
                     {"iterations", iterations},
                     {"nodes", nodes}};
    doc["library"] = json::parse(library_to_json(em.library));
    return doc.dump(2) + "\n";
}

}  // namespace

ScenarioSpec scenario_preset(const std::string& id, const ParameterLibrary& library)
{
    ScenarioSpec s;
    s.scenario_id = id;
    if (id == "s1")
        s.enabled_techs = kBaseTechs;
    else if (id == "s2")
        s.enabled_techs = kCspTechs;
    else if (id == "s3")
        s.enabled_techs = kAllTechSet;
    else if (id == "s4" || id == "s5") {
        s.enabled_techs = kCspTechs;
        s.overrides_json = csp_patch("storage_hours", id == "s4" ? 8.0 : 12.0);
    } else if (id == "s6" || id == "s7") {
        s.enabled_techs = kAllTechSet;
        s.overrides_json = csp_patch("storage_hours", id == "s6" ? 8.0 : 12.0);
    } else if (id == "s8" || id == "s9" || id == "s10" || id == "s11") {
        const bool wind_level = id == "s8" || id == "s10";
        s.enabled_techs = (id == "s8" || id == "s9") ? kCspTechs : kAllTechSet;
        s.overrides_json = csp_patch(
            "capex_annualized", wind_level ? library.wind.capex_annualized : library.pv.capex_annualized);
    } else {
        throw Error(ErrorKind::ValidationError, fmt::format("unknown scenario preset '{}'", id));
    }
    return s;
}

std::vector<std::string> preset_ids()
{
    std::vector<std::string> ids;
    for (int k = 1; k <= 11; ++k)
        ids.push_back(fmt::format("s{}", k));
    return ids;
}

std::string_view to_string(SolverMode mode)
{
    switch (mode) {
    case SolverMode::Builtin: return "builtin";
    case SolverMode::ExportMps: return "export-mps";
    case SolverMode::ImportSolution: return "import-solution";
    }
    return "?";
}

std::optional<SolverMode> parse_mode(std::string_view name)
{
    for (SolverMode m : {SolverMode::Builtin, SolverMode::ExportMps, SolverMode::ImportSolution})
        if (to_string(m) == name)
            return m;
    return std::nullopt;
}

void RunConfig::validate() const
{
    const auto presets = preset_ids();
    auto is_preset = [&](const std::string& id) {
        return std::find(presets.begin(), presets.end(), id) != presets.end();
    };
    std::set<std::string> seen;
    for (const auto& e : scenarios) {
        if (e.id.empty())
            throw Error(ErrorKind::ValidationError, "scenario entry without an id");
        if (!seen.insert(e.id).second)
            throw Error(ErrorKind::ValidationError, fmt::format("duplicate scenario id '{}'", e.id));
        if (!e.preset.empty() && !is_preset(e.preset))
            throw Error(ErrorKind::ValidationError, fmt::format("unknown preset '{}'", e.preset));
        if (e.preset.empty() && !e.techs && !is_preset(e.id))
            throw Error(ErrorKind::ValidationError,
                        fmt::format("scenario '{}' names neither a preset nor a technology set", e.id));
        if (e.rps_fraction && !(*e.rps_fraction >= 0.0 && *e.rps_fraction <= 1.0))
            throw Error(ErrorKind::ValidationError, fmt::format("scenario '{}': rps_fraction outside [0,1]", e.id));
    }
    if (horizon < 0)
        throw Error(ErrorKind::ValidationError, "horizon must be >= 0");
    if (!(feasibility_tol > 0.0 && feasibility_tol < 1e-2) || !(optimality_tol > 0.0 && optimality_tol < 1e-2))
        throw Error(ErrorKind::ValidationError, "solver tolerances must lie in (0, 1e-2)");
    if (max_builtin_columns <= 0)
        throw Error(ErrorKind::ValidationError, "max_builtin_columns must be positive");
    if (mode == SolverMode::ImportSolution && solution.empty())
        throw Error(ErrorKind::ValidationError, "import-solution mode needs a solution file");
}

RunConfig parse_run_config(const std::string& json_text, const fs::path& base_dir)
{
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::ValidationError, fmt::format("config: {}", e.what()));
    }
    if (doc.contains("config") && doc.contains("scenario")) {
        // A manifest: rerun its single scenario with the recorded config.
        json cfg = doc["config"];
        const std::string id = doc["scenario"].get<std::string>();
        json kept = json::array();
        for (const auto& e : cfg.value("scenarios", json::array()))
            if (e.value("id", "") == id)
                kept.push_back(e);
        cfg["scenarios"] = kept;
        doc = cfg;
    }
    if (!doc.is_object())
        throw Error(ErrorKind::ValidationError, "config must be a JSON object");

    static const std::set<std::string> known = {
        "bundle", "params", "horizon", "seed", "mode", "solution", "out", "scenarios", "base",
        "rps_annual", "strict_complementarity", "feasibility_tol", "optimality_tol", "max_builtin_columns"};
    for (const auto& [key, _] : doc.items())
        if (!known.count(key))
            throw Error(ErrorKind::ValidationError, fmt::format("config: unknown key '{}'", key));

    RunConfig cfg;
    try {
        cfg.bundle = resolve(base_dir, doc.value("bundle", ""));
        cfg.params = resolve(base_dir, doc.value("params", ""));
        cfg.solution = resolve(base_dir, doc.value("solution", ""));
        if (doc.contains("out"))
            cfg.out = resolve(base_dir, doc["out"].get<std::string>());
        cfg.horizon = doc.value("horizon", 0);
        cfg.seed = doc.value("seed", std::uint64_t{1});
        if (doc.contains("mode")) {
            const auto m = parse_mode(doc["mode"].get<std::string>());
            if (!m)
                throw Error(ErrorKind::ValidationError,
                            fmt::format("config: unknown mode '{}'", doc["mode"].get<std::string>()));
            cfg.mode = *m;
        }
        cfg.base = doc.value("base", std::string("s1"));
        cfg.rps_annual = doc.value("rps_annual", false);
        cfg.strict_complementarity = doc.value("strict_complementarity", false);
        cfg.feasibility_tol = doc.value("feasibility_tol", cfg.feasibility_tol);
        cfg.optimality_tol = doc.value("optimality_tol", cfg.optimality_tol);
        cfg.max_builtin_columns = doc.value("max_builtin_columns", cfg.max_builtin_columns);
        for (const auto& e : doc.value("scenarios", json::array())) {
            ScenarioEntry entry;
            if (e.is_string()) {
                entry.id = e.get<std::string>();
            } else {
                entry.id = e.at("id").get<std::string>();
                entry.preset = e.value("preset", "");
                if (e.contains("techs"))
                    entry.techs = parse_techs(e["techs"]);
                if (e.contains("rps_fraction"))
                    entry.rps_fraction = e["rps_fraction"].get<double>();
                if (e.contains("overrides"))
                    entry.overrides_json = overrides_text(e["overrides"]);
            }
            cfg.scenarios.push_back(std::move(entry));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::ValidationError, fmt::format("config: {}", e.what()));
    }
    cfg.validate();
    return cfg;
}

std::string run_config_to_json(const RunConfig& cfg)
{
    json doc;
    doc["bundle"] = cfg.bundle.string();
    doc["params"] = cfg.params.string();
    doc["solution"] = cfg.solution.string();
    doc["out"] = cfg.out.string();
    doc["horizon"] = cfg.horizon;
    doc["seed"] = cfg.seed;
    doc["mode"] = std::string(to_string(cfg.mode));
    doc["base"] = cfg.base;
    doc["rps_annual"] = cfg.rps_annual;
    doc["strict_complementarity"] = cfg.strict_complementarity;
    doc["feasibility_tol"] = cfg.feasibility_tol;
    doc["optimality_tol"] = cfg.optimality_tol;
    doc["max_builtin_columns"] = cfg.max_builtin_columns;
    json list = json::array();
    for (const auto& e : cfg.scenarios) {
        json j;
        j["id"] = e.id;
        if (!e.preset.empty())
            j["preset"] = e.preset;
        if (e.techs)
            j["techs"] = techs_json(*e.techs);
        if (e.rps_fraction)
            j["rps_fraction"] = *e.rps_fraction;
        if (!e.overrides_json.empty())
            j["overrides"] = json::parse(e.overrides_json);
        list.push_back(j);
    }
    doc["scenarios"] = list;
    return doc.dump(2);
}

ScenarioInputs load_inputs(const RunConfig& cfg)
{
    ScenarioInputs in;
    if (cfg.bundle.empty()) {
        const int T = cfg.horizon > 0 ? cfg.horizon : kToyHorizon;
        ToyInstance toy = make_toy_instance(cfg.seed, T, kAllTechSet);
        in.bundle = std::move(toy.bundle);
        in.library = std::move(toy.library);
    } else {
        in.bundle = load_bundle(cfg.bundle, 0);
        in.library = default_parameter_library();
    }
    if (!cfg.params.empty())
        apply_overrides(in.library, read_text(cfg.params));
    in.library.validate();

    std::ostringstream csv;
    write_bundle(in.bundle, csv);
    in.bundle_hash = fnv1a_hex(csv.str());
    in.params_hash = fnv1a_hex(library_to_json(in.library));
    return in;
}

ScenarioSpec resolve_spec(const RunConfig& cfg, const ScenarioInputs& inputs, const std::string& scenario_id)
{
    const ScenarioEntry* entry = nullptr;
    for (const auto& e : cfg.scenarios)
        if (e.id == scenario_id)
            entry = &e;

    ScenarioSpec spec;
    if (entry == nullptr) {
        spec = scenario_preset(scenario_id, inputs.library);
    } else {
        const std::string& preset = entry->preset.empty() ? entry->id : entry->preset;
        const auto ids = preset_ids();
        if (std::find(ids.begin(), ids.end(), preset) != ids.end())
            spec = scenario_preset(preset, inputs.library);
        if (entry->techs)
            spec.enabled_techs = *entry->techs;
        if (entry->rps_fraction)
            spec.rps_fraction = *entry->rps_fraction;
        spec.overrides_json = merge_overrides(spec.overrides_json, entry->overrides_json);
    }
    spec.scenario_id = scenario_id;
    spec.horizon = cfg.horizon;
    spec.rps_annual = cfg.rps_annual;
    spec.strict_complementarity = cfg.strict_complementarity;
    spec.validate();
    return spec;
}

ScenarioResult run_scenario(const RunConfig& cfg, const std::string& scenario_id)
{
    cfg.validate();
    const ScenarioInputs inputs = load_inputs(cfg);
    const ScenarioSpec spec = resolve_spec(cfg, inputs, scenario_id);
    const ExpansionModel em = build_model(spec, inputs.bundle, inputs.library);

    ScenarioResult result;
    result.id = scenario_id;
    result.dir = cfg.out / scenario_id;
    fs::create_directories(result.dir);

    if (cfg.mode == SolverMode::ExportMps) {
        write_mps(em.lp, result.dir / "model.mps");
        write_text(result.dir / "manifest.json",
                   manifest_json(cfg, inputs, em, scenario_id, "exported",
                                 std::numeric_limits<double>::quiet_NaN(), 0, 0));
        return result;
    }

    lp::Solution raw;
    const auto t0 = std::chrono::steady_clock::now();
    if (cfg.mode == SolverMode::ImportSolution) {
        raw = lp::read_external_solution(em.lp, cfg.solution, std::max(1e-6, cfg.feasibility_tol));
    } else {
        if (em.lp.num_cols() > cfg.max_builtin_columns)
            throw Error(ErrorKind::BudgetExceeded,
                        fmt::format("scenario '{}': {} columns exceed the builtin budget of {}; use export-mps",
                                    scenario_id, em.lp.num_cols(), cfg.max_builtin_columns));
        lp::SimplexOptions so;
        so.feasibility_tol = cfg.feasibility_tol;
        so.optimality_tol = cfg.optimality_tol;
        if (em.lp.num_binaries() > 0) {
            lp::BnbOptions bo;
            bo.lp = so;
            raw = lp::solve_bnb(em.lp, bo);
        } else {
            raw = lp::solve_lp(em.lp, so);
        }
        if (raw.status != lp::SolveStatus::Optimal)
            throw Error(ErrorKind::SolveFailed, fmt::format("scenario '{}': solver returned {}", scenario_id,
                                                            lp::to_string(raw.status)));
    }
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.status = raw.status;
    result.iterations = raw.stats.iterations;

    PlanSolution plan = extract_solution(em, raw);
    MetricsReport metrics = compute_metrics(em, plan);
    write_outputs(result.dir, em, plan, metrics);
    write_text(result.dir / "manifest.json",
               manifest_json(cfg, inputs, em, scenario_id, lp::to_string(raw.status), raw.objective,
                             raw.stats.iterations, raw.stats.nodes));
    result.plan = std::move(plan);
    result.metrics = std::move(metrics);
    return result;
}

std::vector<ComparisonRow> compare_scenarios(std::span<const MetricsReport> reports, const std::string& base_id)
{
    if (reports.size() < 2)
        throw Error(ErrorKind::ValidationError, "comparison needs at least two scenarios");
    const MetricsReport* base = nullptr;
    for (const auto& r : reports) {
        for (double v : {r.objective, r.peak_valley.difference, r.curtailment.rate})
            if (!std::isfinite(v))
                throw Error(ErrorKind::ValidationError, fmt::format("scenario '{}' has a missing index", r.scenario_id));
        if (r.scenario_id == base_id)
            base = &r;
    }
    if (base == nullptr)
        throw Error(ErrorKind::MissingBase, fmt::format("base scenario '{}' is not among the results", base_id));

    auto ratio = [](double v, double ref) {
        return ref != 0.0 ? v / ref : std::numeric_limits<double>::quiet_NaN();
    };
    std::vector<ComparisonRow> rows;
    for (const auto& r : reports) {
        ComparisonRow row;
        row.id = r.scenario_id;
        row.cost_norm = ratio(r.objective, base->objective);
        row.peak_valley_norm = ratio(r.peak_valley.difference, base->peak_valley.difference);
        row.curtailment_norm = ratio(r.curtailment.rate, base->curtailment.rate);
        const bool drawable = [&] {
            for (double v : {row.cost_norm, row.peak_valley_norm, row.curtailment_norm})
                if (!(v > 0.0) || !std::isfinite(v))
                    return false;
            return true;
        }();
        if (drawable)
            row.area = benefit_triangle(row.cost_norm, row.peak_valley_norm, row.curtailment_norm);
        rows.push_back(row);
    }
    ComparisonRow* best = nullptr;
    for (auto& row : rows)
        if (row.area && (best == nullptr || *row.area < *best->area))
            best = &row;
    if (best != nullptr)
        best->best = true;
    return rows;
}

std::string comparison_csv(std::span<const ComparisonRow> rows)
{
    auto cell = [](double v) { return std::isfinite(v) ? num(v) : std::string(); };
    std::string s = "scenario,cost_norm,peak_valley_norm,curtailment_norm,area,best\n";
    for (const auto& r : rows)
        s += fmt::format("{},{},{},{},{},{}\n", r.id, cell(r.cost_norm), cell(r.peak_valley_norm),
                         cell(r.curtailment_norm), r.area ? num(*r.area) : std::string(), r.best ? 1 : 0);
    return s;
}

std::string fnv1a_hex(std::string_view data)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return fmt::format("{:016x}", h);
}

}  // namespace capexp
