#include "capexp/solution_io.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>

#include "capexp/error.hpp"
#include "csv.hpp"

namespace capexp::lp {

void write_solution_csv(const LpModel& model, const Solution& solution, std::ostream& out)
{
    if (static_cast<int>(solution.primal.size()) != model.num_cols())
        throw Error(ErrorKind::ValidationError, "solution size does not match the model");
    out << "name,value\n";
    for (int j = 0; j < model.num_cols(); ++j)
        out << csv::quote(model.col_name(j)) << ',' << fmt::format("{:.16e}", solution.primal[j])
            << '\n';
    if (!out)
        throw Error(ErrorKind::IoError, "failed while writing solution CSV");
}

void write_solution_csv(const LpModel& model, const Solution& solution,
                        const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "' for writing");
    write_solution_csv(model, solution, out);
}

Solution read_external_solution(const LpModel& model, std::istream& in, double tol)
{
    std::vector<std::string> rec;
    if (!csv::read_record(in, rec) || rec.size() < 2 || csv::trim(rec[0]) != "name" ||
        csv::trim(rec[1]) != "value")
        throw Error(ErrorKind::IoError, "solution CSV must start with header 'name,value'");

    const int n = model.num_cols();
    std::vector<double> x(n, 0.0);
    std::vector<char> seen(n, 0);
    int line = 1;
    while (csv::read_record(in, rec)) {
        ++line;
        if (rec.size() == 1 && csv::trim(rec[0]).empty())
            continue;
        if (rec.size() != 2)
            throw Error(ErrorKind::IoError, fmt::format("line {}: expected 2 fields", line));
        const auto name = std::string(csv::trim(rec[0]));
        auto j = model.find_col(name);
        if (!j)
            throw Error(ErrorKind::UnknownColumn, "'" + name + "' is not a model column");
        if (seen[*j])
            throw Error(ErrorKind::IoError, "column '" + name + "' appears twice");
        const auto v_text = csv::trim(rec[1]);
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(v_text.data(), v_text.data() + v_text.size(), v);
        if (ec != std::errc{} || ptr != v_text.data() + v_text.size() || !std::isfinite(v))
            throw Error(ErrorKind::IoError,
                        fmt::format("line {}: bad value '{}' for '{}'", line, v_text, name));
        x[*j] = v;
        seen[*j] = 1;
    }
    for (int j = 0; j < n; ++j)
        if (!seen[j])
            throw Error(ErrorKind::MissingColumn, "column '" + model.col_name(j) + "' has no value");

    const Residual r = primal_residual(model, x);
    if (r.max_violation > tol) {
        const std::string where = r.worst_row >= 0 ? "row '" + model.row_name(r.worst_row) + "'"
                                                   : "bounds of '" + model.col_name(r.worst_col) + "'";
        throw Error(ErrorKind::ResidualTooLarge,
                    fmt::format("relative residual {:.3e} at {}", r.max_violation, where));
    }

    Solution s;
    s.status = SolveStatus::Feasible;
    s.row_activity = model.row_activity(x);
    s.objective = model.objective_value(x);
    s.primal = std::move(x);
    return s;
}

Solution read_external_solution(const LpModel& model, const std::filesystem::path& path, double tol)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "'");
    return read_external_solution(model, in, tol);
}

}  // namespace capexp::lp
