#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "capexp/lp_model.hpp"
#include "capexp/uc_block.hpp"
#include "capexp/unit_models.hpp"

namespace capexp {

/// Commitment view of a thermal group shared by coal, CHP and CSP. All units
/// in a group share the output and ramp fractions; nameplates may differ.
struct CommitmentParams {
    std::string group_id;
    std::vector<double> nameplates;  // MW per unit; total is the group capacity S
    double min_output_frac = 0.5;
    double max_output_frac = 1.0;
    double ramp_frac_per_h = 0.35;
    int min_up_h = 1;
    int min_down_h = 1;
    // Objective terms. energy_cost applies to the group output per MWh,
    // startup_cost per MW started, noload_cost per MW online per hour.
    double energy_cost = 0.0;
    double startup_cost = 0.0;
    double noload_cost = 0.0;
    double dt_h = 1.0;

    double total() const;
    double largest() const;
    void validate() const;  // Throws Error(InvalidParams)
};

/// Unit list from existing_capacity / unit_size (rounded, at least one unit
/// when capacity is positive) of equal size summing to existing_capacity.
CommitmentParams commitment_params(const CoalGroupParams& g);
CommitmentParams commitment_params(const ChpGroupParams& g);
CommitmentParams commitment_params(const CspGroupParams& g);

/// Variable names used by both builders.
std::string uc_name(std::string_view symbol, std::string_view group, int t);
std::string unit_name(std::string_view symbol, std::string_view group, int unit, int t);

struct ExactUcOptions {
    long max_binaries = 200;     // unit count × T budget
    std::string output_symbol = "P";
};

/// Per-unit formulation: binary on/off x, start u and stop d in [0,1] (they
/// are integral whenever x is), per-unit output p and the group output
/// P[g,t] = Σ p. p0 and x0 hold per-unit initial output and status; an empty
/// p0 means min stable output for units that are on.
UnitCommitmentBlock build_exact_uc(const CommitmentParams& params, int T, std::span<const double> p0,
                                   std::span<const int> x0, const ExactUcOptions& options = {});

struct ClusteredUcOptions {
    // When set, the group capacity S is this external column (expansion mode)
    // and online capacity is capped by a row. Otherwise S = params.total().
    std::optional<std::string> capacity_var;
    // Initial group output; NaN means min_output_frac · s0_online.
    double p0 = std::numeric_limits<double>::quiet_NaN();
    std::string output_symbol = "P";
    bool declare_output = true;  // false: output column is external
};

/// Continuous online, startup and shutdown capacity per hour with clustered
/// output, ramp and minimum up/down rows. Throws Error(InvalidInitialState)
/// when s0_online is outside [0, S].
UnitCommitmentBlock build_clustered_uc(const CommitmentParams& params, int T, double s0_online,
                                       const ClusteredUcOptions& options = {});

struct ClusterState {
    std::vector<double> online_cap;
    std::vector<double> startup_cap;
    std::vector<double> shutdown_cap;
    double group_total = 0.0;
};

struct UnitStatus {
    int initial = 0;
    std::vector<int> on;
    std::vector<int> start;
    std::vector<int> stop;
};

/// Capacity-weighted sums of per-unit statuses. Throws
/// Error(InconsistentStatuses) on length mismatch, non-binary entries or a
/// transition that does not match start minus stop.
ClusterState aggregate_cluster_state(std::span<const UnitStatus> statuses, std::span<const double> nameplates);

/// Reads SO/SU/SD of a clustered solution by variable name.
ClusterState read_cluster_state(const lp::LpModel& model, const lp::Solution& sol, const CommitmentParams& params,
                                int T);

/// Reads rounded per-unit statuses of an exact solution by variable name.
std::vector<UnitStatus> read_unit_statuses(const lp::LpModel& model, const lp::Solution& sol,
                                           const CommitmentParams& params, int T, std::span<const int> x0);

struct UcSolution {
    lp::SolveStatus status = lp::SolveStatus::Infeasible;
    double objective = 0.0;
    ClusterState state;
};

struct GapReport {
    double max_online_deviation = 0.0;
    int worst_hour = 0;  // 1-based
    double largest_nameplate = 0.0;
    bool within_bound = false;  // deviation <= largest nameplate (+1e-6)
    double objective_gap = 0.0;  // exact - clustered
    double relative_objective_gap = 0.0;
};

/// Throws Error(NotOptimal) unless both solutions are optimal.
GapReport certify_gap(const UcSolution& exact, const UcSolution& clustered, std::span<const double> nameplates);

}  // namespace capexp
