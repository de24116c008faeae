#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "capexp/expansion_model.hpp"
#include "capexp/metrics.hpp"
#include "capexp/simplex.hpp"

namespace capexp {

/// s1-s3: technology sets (coal, wind, pv, chp; + csp; + eb). s4/s5 and
/// s6/s7 shorten/lengthen storage to 8/12 h on s2 and s3; s8/s9 and s10/s11
/// set the CSP capital cost to the wind/PV level on s2 and s3. Values that
/// depend on the library are resolved against it. Throws
/// Error(ValidationError) for an unknown id.
ScenarioSpec scenario_preset(const std::string& id, const ParameterLibrary& library);
std::vector<std::string> preset_ids();

enum class SolverMode { Builtin, ExportMps, ImportSolution };

std::string_view to_string(SolverMode mode);
std::optional<SolverMode> parse_mode(std::string_view name);

struct ScenarioEntry {
    std::string id;
    std::string preset;          // empty: build from the fields below only
    std::optional<TechSet> techs;  // replaces the preset's set
    std::optional<double> rps_fraction;
    std::string overrides_json;  // applied after the preset's own overrides
};

struct RunConfig {
    std::filesystem::path bundle;  // empty: generate the toy instance from seed
    std::filesystem::path params;  // override document for the default library
    int horizon = 0;               // 0: whole bundle (toy default 168)
    std::uint64_t seed = 1;
    SolverMode mode = SolverMode::Builtin;
    std::filesystem::path solution;  // import mode: name,value CSV
    std::filesystem::path out = "out";
    std::vector<ScenarioEntry> scenarios;
    std::string base = "s1";
    bool rps_annual = false;
    bool strict_complementarity = false;
    double feasibility_tol = 1e-7;
    double optimality_tol = 1e-7;
    long max_builtin_columns = 200000;  // larger models must use export-mps

    /// Unique ids, known presets, sane tolerances. Throws Error(ValidationError).
    void validate() const;
};

/// JSON config (schema in the README). Relative paths resolve against
/// base_dir. A manifest written by run_scenario is accepted as well.
RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir = {});
std::string run_config_to_json(const RunConfig& cfg);

struct ScenarioResult {
    std::string id;
    std::optional<lp::SolveStatus> status;  // absent in export mode
    std::optional<PlanSolution> plan;
    std::optional<MetricsReport> metrics;
    long iterations = 0;
    double seconds = 0.0;  // wall time, reported but never written to disk
    std::filesystem::path dir;
};

/// Loads inputs, builds, solves or exports, extracts and writes
/// capacities.csv, dispatch_<tech>.csv, tes_soc.csv, metrics.json and
/// manifest.json (plus model.mps in export mode) under cfg.out / id.
/// Outputs are byte-identical for identical inputs. Throws
/// Error(SolveFailed) on a non-optimal solve and Error(BudgetExceeded) when
/// the builtin solver would receive a model over the size budget.
ScenarioResult run_scenario(const RunConfig& cfg, const std::string& scenario_id);

/// Inputs shared by all scenarios of a config.
struct ScenarioInputs {
    TimeSeriesBundle bundle;
    ParameterLibrary library;
    std::string bundle_hash;  // FNV-1a of the bundle CSV text
    std::string params_hash;
};
ScenarioInputs load_inputs(const RunConfig& cfg);
ScenarioSpec resolve_spec(const RunConfig& cfg, const ScenarioInputs& inputs, const std::string& scenario_id);

struct ComparisonRow {
    std::string id;
    double cost_norm = 0.0;
    double peak_valley_norm = 0.0;
    double curtailment_norm = 0.0;
    std::optional<double> area;  // empty when an index is zero
    bool best = false;
};

/// Normalizes total cost, peak-valley difference and curtailment rate to
/// the base report and computes the triangle areas; the smallest area is
/// flagged. Throws Error(MissingBase) when base_id is absent and
/// Error(ValidationError) for fewer than two reports or a non-finite index.
std::vector<ComparisonRow> compare_scenarios(std::span<const MetricsReport> reports, const std::string& base_id);
std::string comparison_csv(std::span<const ComparisonRow> rows);

/// 64-bit FNV-1a as 16 hex digits.
std::string fnv1a_hex(std::string_view data);

}  // namespace capexp
