#pragma once

#include <filesystem>
#include <iosfwd>

#include "capexp/lp_model.hpp"

namespace capexp::lp {

/// `name,value` CSV with a header line, one row per column in model order.
void write_solution_csv(const LpModel& model, const Solution& solution, std::ostream& out);
void write_solution_csv(const LpModel& model, const Solution& solution,
                        const std::filesystem::path& path);

/// Imports a primal point produced elsewhere (e.g. an external solver fed
/// with write_mps output) and validates it against bounds and rows. Every
/// model column must appear exactly once. On success the status is Feasible
/// since no optimality proof accompanies the file.
/// Throws Error(UnknownColumn | MissingColumn | ResidualTooLarge | IoError).
Solution read_external_solution(const LpModel& model, std::istream& in, double tol = 1e-6);
Solution read_external_solution(const LpModel& model, const std::filesystem::path& path,
                                double tol = 1e-6);

}  // namespace capexp::lp
