#pragma once

#include <filesystem>
#include <iosfwd>

#include "capexp/lp_model.hpp"

namespace capexp::lp {

struct MpsOptions {
    /// Replace names with C0000001/R0000001 so every field fits the classic
    /// 8-character fixed columns. Off by default: names are kept and fields
    /// are separated by at least two blanks, which free-format readers accept.
    bool generic_names = false;
    std::string problem_name = "CAPEXP";
};

/// Emits NAME/ROWS/COLUMNS/RHS/RANGES/BOUNDS/ENDATA. Binaries sit inside
/// INTORG/INTEND markers with explicit bounds. The objective constant is
/// written as the negated RHS of the objective row. Numbers use 17
/// significant digits in scientific notation, so a read back is exact.
void write_mps(const LpModel& model, std::ostream& out, const MpsOptions& options = {});
void write_mps(const LpModel& model, const std::filesystem::path& path,
               const MpsOptions& options = {});

/// Whitespace-delimited reader for the subset produced by write_mps (no
/// RANGES entries, no general integers).
LpModel read_mps(std::istream& in);
LpModel read_mps(const std::filesystem::path& path);

}  // namespace capexp::lp
