#include <benchmark/benchmark.h>

#include <random>

#include "capexp/branch_and_bound.hpp"
#include "capexp/expansion_model.hpp"
#include "capexp/scenario.hpp"
#include "capexp/simplex.hpp"
#include "capexp/toy_instance.hpp"
#include "capexp/uc_oracle.hpp"

using namespace capexp;

namespace {

// Dense random LP, boxed so it is always bounded and feasible at zero.
lp::LpModel random_lp(int n, int m, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    lp::LpModel model;
    for (int j = 0; j < n; ++j)
        model.add_column("x" + std::to_string(j), 0.0, 10.0, -u(rng));
    for (int i = 0; i < m; ++i) {
        const int r = model.add_row("r" + std::to_string(i), lp::RowSense::Le, 5.0 * n * u(rng) + 1.0);
        for (int j = 0; j < n; ++j)
            if (u(rng) < 0.3)
                model.add_coefficient(r, j, u(rng));
    }
    return model;
}

const TechSet kAll{Tech::Coal, Tech::Wind, Tech::Pv, Tech::Chp, Tech::Csp, Tech::Eb};

}  // namespace

static void BM_SimplexRandom(benchmark::State& state)
{
    const int n = static_cast<int>(state.range(0));
    const lp::LpModel model = random_lp(n, n / 2, 42);
    for (auto _ : state) {
        lp::Solution s = lp::solve_lp(model);
        benchmark::DoNotOptimize(s.objective);
    }
    state.SetComplexityN(n);
}
BENCHMARK(BM_SimplexRandom)->RangeMultiplier(2)->Range(16, 256)->Complexity();

static void BM_UcOracleExact(benchmark::State& state)
{
    const UcOracleInstance inst = make_uc_oracle_instance(static_cast<std::uint64_t>(state.range(0)));
    const lp::LpModel model = build_uc_oracle_model(inst, UcMode::Exact);
    for (auto _ : state) {
        lp::Solution s = lp::solve_bnb(model);
        benchmark::DoNotOptimize(s.objective);
    }
}
BENCHMARK(BM_UcOracleExact)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

static void BM_UcOracleClustered(benchmark::State& state)
{
    const UcOracleInstance inst = make_uc_oracle_instance(static_cast<std::uint64_t>(state.range(0)));
    const lp::LpModel model = build_uc_oracle_model(inst, UcMode::Clustered);
    for (auto _ : state) {
        lp::Solution s = lp::solve_lp(model);
        benchmark::DoNotOptimize(s.objective);
    }
}
BENCHMARK(BM_UcOracleClustered)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

static void BM_BuildExpansionModel(benchmark::State& state)
{
    const int T = static_cast<int>(state.range(0));
    const ToyInstance toy = make_toy_instance(1, T, kAll);
    const ScenarioSpec spec = scenario_preset("s3", toy.library);
    for (auto _ : state) {
        ExpansionModel em = build_model(spec, toy.bundle, toy.library);
        benchmark::DoNotOptimize(em.lp.num_cols());
    }
}
BENCHMARK(BM_BuildExpansionModel)->Arg(24)->Arg(168)->Arg(720)->Unit(benchmark::kMillisecond);

static void BM_SolveToyScenario(benchmark::State& state)
{
    const int T = static_cast<int>(state.range(0));
    const char* id = state.range(1) == 1 ? "s1" : state.range(1) == 2 ? "s2" : "s3";
    const ToyInstance toy = make_toy_instance(1, T, kAll);
    const ExpansionModel em = build_model(scenario_preset(id, toy.library), toy.bundle, toy.library);
    state.SetLabel(id);
    for (auto _ : state) {
        lp::Solution s = lp::solve_lp(em.lp);
        benchmark::DoNotOptimize(s.objective);
    }
}
BENCHMARK(BM_SolveToyScenario)
    ->Args({24, 1})
    ->Args({24, 2})
    ->Args({24, 3})
    ->Args({48, 3})
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
