// Command-line front end: run scenarios from a JSON config, or write a toy
// instance to disk.

#include <fmt/format.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "capexp/error.hpp"
#include "capexp/scenario.hpp"
#include "capexp/toy_instance.hpp"

namespace fs = std::filesystem;
using namespace capexp;

namespace {

enum Exit { kOk = 0, kValidation = 2, kSolve = 3, kBudget = 4 };

int exit_code(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::SolveFailed:
    case ErrorKind::StatusNotOptimal:
    case ErrorKind::ResidualTooLarge:
    case ErrorKind::NotOptimal:
        return kSolve;
    case ErrorKind::BudgetExceeded:
        return kBudget;
    default:
        return kValidation;
    }
}

std::string read_file(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::IoError, fmt::format("cannot open '{}'", p.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct RunArgs {
    std::string config;
    std::vector<std::string> scenarios;
    std::string mode;
    std::string out;
    std::string solution;
    std::string base;
    int horizon = -1;
    long long seed = -1;
    bool rps_annual = false;
    bool strict = false;
};

int run(const RunArgs& a)
{
    RunConfig cfg;
    if (!a.config.empty()) {
        const fs::path p(a.config);
        cfg = parse_run_config(read_file(p), p.parent_path());
    }
    // Flags win over the file.
    if (!a.mode.empty()) {
        const auto m = parse_mode(a.mode);
        if (!m)
            throw Error(ErrorKind::ValidationError, fmt::format("unknown mode '{}'", a.mode));
        cfg.mode = *m;
    }
    if (!a.out.empty())
        cfg.out = a.out;
    if (!a.solution.empty())
        cfg.solution = a.solution;
    if (!a.base.empty())
        cfg.base = a.base;
    if (a.horizon >= 0)
        cfg.horizon = a.horizon;
    if (a.seed >= 0)
        cfg.seed = static_cast<std::uint64_t>(a.seed);
    cfg.rps_annual = cfg.rps_annual || a.rps_annual;
    cfg.strict_complementarity = cfg.strict_complementarity || a.strict;
    cfg.validate();

    std::vector<std::string> ids = a.scenarios;
    if (ids.empty())
        for (const auto& e : cfg.scenarios)
            ids.push_back(e.id);
    if (ids.empty())
        ids = {"s1", "s2", "s3"};

    std::vector<MetricsReport> reports;
    for (const auto& id : ids) {
        const ScenarioResult r = run_scenario(cfg, id);
        if (!r.status) {
            fmt::print("{:<10} exported        {}\n", id, (r.dir / "model.mps").string());
            continue;
        }
        fmt::print("{:<10} {:<15} objective {:.6f}  iterations {}  {:.2f} s\n", id, lp::to_string(*r.status),
                   r.plan->objective, r.iterations, r.seconds);
        reports.push_back(*r.metrics);
    }

    if (reports.size() >= 2) {
        const bool has_base = std::any_of(reports.begin(), reports.end(),
                                          [&](const MetricsReport& m) { return m.scenario_id == cfg.base; });
        if (has_base) {
            const auto rows = compare_scenarios(reports, cfg.base);
            std::ofstream(cfg.out / "compare.csv", std::ios::binary) << comparison_csv(rows);
            for (const auto& row : rows)
                if (row.best)
                    fmt::print("smallest benefit triangle: {} ({:.5f})\n", row.id, *row.area);
        } else {
            fmt::print(stderr, "note: base '{}' was not run; compare.csv skipped\n", cfg.base);
        }
    }
    return kOk;
}

int toy(std::uint64_t seed, int horizon, const std::string& out, bool no_csp)
{
    TechSet techs{Tech::Coal, Tech::Wind, Tech::Pv, Tech::Chp, Tech::Csp, Tech::Eb};
    if (no_csp)
        techs.remove(Tech::Csp);
    write_toy_instance(make_toy_instance(seed, horizon, techs), out);
    fmt::print("wrote {}/bundle.csv and {}/params.json\n", out, out);
    return kOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Generation expansion planning with clustered unit commitment and CSP storage"};
    app.require_subcommand(1);

    RunArgs ra;
    CLI::App* run_cmd = app.add_subcommand("run", "Build, solve and report scenarios");
    run_cmd->add_option("--config", ra.config, "JSON run config or a manifest.json")->check(CLI::ExistingFile);
    run_cmd->add_option("--scenario", ra.scenarios, "Scenario id (repeatable); default: config list or s1 s2 s3");
    run_cmd->add_option("--mode", ra.mode, "builtin | export-mps | import-solution");
    run_cmd->add_option("--out", ra.out, "Output directory");
    run_cmd->add_option("--solution", ra.solution, "name,value CSV for import-solution");
    run_cmd->add_option("--base", ra.base, "Base scenario for compare.csv");
    run_cmd->add_option("--horizon", ra.horizon, "Hours to model (0 = whole bundle)")->check(CLI::NonNegativeNumber);
    run_cmd->add_option("--seed", ra.seed, "Toy instance seed when no bundle is configured")
        ->check(CLI::NonNegativeNumber);
    run_cmd->add_flag("--rps-annual", ra.rps_annual, "One annual renewable-share row instead of hourly rows");
    run_cmd->add_flag("--strict-complementarity", ra.strict, "Binary switch against simultaneous TES flows");

    std::uint64_t toy_seed = 1;
    int toy_horizon = 168;
    std::string toy_out = "toy";
    bool toy_no_csp = false;
    CLI::App* toy_cmd = app.add_subcommand("toy", "Write a seeded synthetic instance");
    toy_cmd->add_option("--seed", toy_seed, "Seed");
    toy_cmd->add_option("--horizon", toy_horizon, "Hours (>= 24)");
    toy_cmd->add_option("--out", toy_out, "Directory for bundle.csv and params.json");
    toy_cmd->add_flag("--no-csp", toy_no_csp, "Omit the CSP series");

    CLI::App* presets_cmd = app.add_subcommand("presets", "List the built-in scenario presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kValidation;
    }

    try {
        if (run_cmd->parsed())
            return run(ra);
        if (toy_cmd->parsed())
            return toy(toy_seed, toy_horizon, toy_out, toy_no_csp);
        if (presets_cmd->parsed()) {
            const ParameterLibrary lib = default_parameter_library();
            for (const auto& id : preset_ids()) {
                const ScenarioSpec s = scenario_preset(id, lib);
                std::string techs;
                for (Tech t : s.enabled_techs.list())
                    techs += std::string(techs.empty() ? "" : ",") + std::string(to_string(t));
                fmt::print("{:<4} {:<28} {}\n", id, techs, s.overrides_json);
            }
            return kOk;
        }
    } catch (const Error& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kValidation;
    }
    return kOk;
}
