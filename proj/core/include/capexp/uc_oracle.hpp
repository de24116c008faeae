#pragma once

#include <cstdint>
#include <vector>

#include "capexp/branch_and_bound.hpp"
#include "capexp/cluster_uc.hpp"

namespace capexp {

/// Single-bus commitment instance small enough for exact branch and bound.
/// Unserved demand is bought from a backup source and surplus output can be
/// dumped, so every instance is feasible in both modes.
struct UcOracleInstance {
    CommitmentParams group;
    int T = 24;
    std::vector<double> demand;  // MW, length T
    std::vector<int> x0;         // per-unit initial status
    double backup_cost = 300.0;  // per MWh
    double dump_cost = 40.0;     // per MWh
};

/// Seeded instance with 2-4 equal units and a 24-48 h demand profile.
UcOracleInstance make_uc_oracle_instance(std::uint64_t seed);

enum class UcMode { Exact, Clustered };

/// Commitment block plus the hourly balance P + backup - dump = demand.
lp::LpModel build_uc_oracle_model(const UcOracleInstance& inst, UcMode mode);

struct UcOracleResult {
    UcSolution exact;
    UcSolution clustered;
    GapReport gap;
    double exact_seconds = 0.0;
    double clustered_seconds = 0.0;
    long bnb_nodes = 0;
};

/// Solves both modes (exact by branch and bound, clustered by simplex) and
/// certifies the gap.
UcOracleResult run_uc_oracle(const UcOracleInstance& inst, const lp::BnbOptions& options = {});

}  // namespace capexp
