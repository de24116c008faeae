#include "capexp/uc_oracle.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include "capexp/simplex.hpp"

namespace capexp {

namespace {

// Mixed-integer rounding of the hourly capacity rows for a fleet of equal
// units, X = sum_i x_i integer:
//   Pmax X + backup >= D   ->  X + backup / (Pmax f) >= ceil(D / Pmax)
//   Pmin X - dump   <= D   ->  X - dump / (Pmin (1 - g)) <= floor(D / Pmin)
// Both hold for every integer schedule, so the optimum is unchanged; they
// only cut fractional commitments off the relaxation.
void add_commitment_covers(lp::LpModel& model, const UcOracleInstance& inst, int t, int backup, int dump)
{
    const auto& np = inst.group.nameplates;
    if (np.empty() || std::any_of(np.begin(), np.end(), [&](double v) { return v != np.front(); }))
        return;
    const std::string& g = inst.group.group_id;
    const double d = inst.demand[t - 1];
    std::vector<lp::Term> terms;
    for (size_t i = 0; i < np.size(); ++i)
        terms.push_back({*model.find_col(unit_name("x", g, static_cast<int>(i) + 1, t)), 1.0});

    const double pmax = inst.group.max_output_frac * np.front();
    const double beta = d / pmax;
    const double f = beta - std::floor(beta);
    if (f > 1e-9 && f < 1.0 - 1e-9) {
        auto row = terms;
        row.push_back({backup, 1.0 / (pmax * f)});
        model.add_row(fmt::format("cover_up[t={}]", t), row, lp::RowSense::Ge, std::ceil(beta));
    }
    const double pmin = inst.group.min_output_frac * np.front();
    if (pmin > 0.0) {
        const double gam = d / pmin;
        const double h = gam - std::floor(gam);
        if (h > 1e-9 && h < 1.0 - 1e-9) {
            auto row = terms;
            row.push_back({dump, -1.0 / (pmin * (1.0 - h))});
            model.add_row(fmt::format("cover_down[t={}]", t), row, lp::RowSense::Le, std::floor(gam));
        }
    }
}

}  // namespace

UcOracleInstance make_uc_oracle_instance(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> units_d(2, 4);
    std::uniform_int_distribution<int> hours_d(24, 48);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    UcOracleInstance inst;
    const int n = units_d(rng);
    inst.T = hours_d(rng);
    CommitmentParams& g = inst.group;
    g.group_id = "oracle";
    const double size = n == 4 ? 25.0 : 50.0;
    g.nameplates.assign(n, size);
    g.min_output_frac = 0.3 + 0.2 * uni(rng);
    g.max_output_frac = 1.0;
    g.ramp_frac_per_h = 0.3 + 0.3 * uni(rng);
    g.min_up_h = std::uniform_int_distribution<int>(2, 5)(rng);
    g.min_down_h = std::uniform_int_distribution<int>(2, 4)(rng);
    g.energy_cost = 30.0;
    g.startup_cost = 15.0 + 15.0 * uni(rng);
    g.noload_cost = 3.0;

    const double total = g.total();
    const double phase = 2.0 * std::numbers::pi * uni(rng);
    for (int t = 0; t < inst.T; ++t) {
        const double daily = std::sin(2.0 * std::numbers::pi * t / 24.0 + phase);
        const double level = 0.55 + 0.3 * daily + 0.1 * (uni(rng) - 0.5);
        inst.demand.push_back(std::max(0.0, level) * total);
    }
    for (int i = 0; i < n; ++i)
        inst.x0.push_back(uni(rng) < 0.5 ? 1 : 0);
    return inst;
}

lp::LpModel build_uc_oracle_model(const UcOracleInstance& inst, UcMode mode)
{
    UnitCommitmentBlock block;
    if (mode == UcMode::Exact) {
        ExactUcOptions opts;
        opts.max_binaries = 200;
        block = build_exact_uc(inst.group, inst.T, {}, inst.x0, opts);
    } else {
        double s0 = 0.0;
        for (size_t i = 0; i < inst.x0.size(); ++i)
            s0 += inst.x0[i] * inst.group.nameplates[i];
        block = build_clustered_uc(inst.group, inst.T, s0);
    }
    lp::LpModel model;
    merge_block(model, block);
    const std::string& g = inst.group.group_id;
    for (int t = 1; t <= inst.T; ++t) {
        const int backup = model.add_column(fmt::format("backup[t={}]", t), 0.0, lp::kInf, inst.backup_cost);
        const int dump = model.add_column(fmt::format("dump[t={}]", t), 0.0, lp::kInf, inst.dump_cost);
        const lp::Term terms[] = {{*model.find_col(uc_name("P", g, t)), 1.0}, {backup, 1.0}, {dump, -1.0}};
        model.add_row(fmt::format("balance[t={}]", t), terms, lp::RowSense::Eq, inst.demand[t - 1]);
        if (mode == UcMode::Exact)
            add_commitment_covers(model, inst, t, backup, dump);
    }
    return model;
}

UcOracleResult run_uc_oracle(const UcOracleInstance& inst, const lp::BnbOptions& options)
{
    using clock = std::chrono::steady_clock;
    UcOracleResult out;

    const lp::LpModel exact = build_uc_oracle_model(inst, UcMode::Exact);
    auto t0 = clock::now();
    const lp::Solution xs = lp::solve_bnb(exact, options);
    out.exact_seconds = std::chrono::duration<double>(clock::now() - t0).count();
    out.bnb_nodes = xs.stats.nodes;
    out.exact.status = xs.status;
    out.exact.objective = xs.objective;
    if (xs.status == lp::SolveStatus::Optimal) {
        const auto statuses = read_unit_statuses(exact, xs, inst.group, inst.T, inst.x0);
        out.exact.state = aggregate_cluster_state(statuses, inst.group.nameplates);
    }

    const lp::LpModel clustered = build_uc_oracle_model(inst, UcMode::Clustered);
    t0 = clock::now();
    const lp::Solution cs = lp::solve_lp(clustered, options.lp);
    out.clustered_seconds = std::chrono::duration<double>(clock::now() - t0).count();
    out.clustered.status = cs.status;
    out.clustered.objective = cs.objective;
    if (cs.status == lp::SolveStatus::Optimal)
        out.clustered.state = read_cluster_state(clustered, cs, inst.group, inst.T);

    out.gap = certify_gap(out.exact, out.clustered, inst.group.nameplates);
    return out;
}

}  // namespace capexp
