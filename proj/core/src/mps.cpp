#include "capexp/mps.hpp"

#include <fmt/format.h>

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "capexp/error.hpp"

namespace capexp::lp {

namespace {

std::string num(double v) { return fmt::format("{:.16e}", v); }

bool plain_name(const std::string& s)
{
    if (s.empty())
        return false;
    for (unsigned char ch : s)
        if (std::isspace(ch) || !std::isprint(ch))
            return false;
    return true;
}

// Field 1 at column 2, field 2 at column 5, field 3 at column 15, field 4
// at column 25. Long names push later fields right.
std::string entry(std::string_view code, std::string_view f2, std::string_view f3,
                  std::string_view f4)
{
    std::string s = fmt::format(" {:<2} {:<8}  {:<8}  {}", code, f2, f3, f4);
    s.erase(s.find_last_not_of(' ') + 1);
    s.push_back('\n');
    return s;
}

}  // namespace

void write_mps(const LpModel& model, std::ostream& out, const MpsOptions& opt)
{
    model.validate();
    if (model.num_cols() == 0)
        throw Error(ErrorKind::ValidationError, "refusing to write an MPS file for an empty model");

    const int m = model.num_rows(), n = model.num_cols();
    std::vector<std::string> cname(n), rname(m);
    for (int j = 0; j < n; ++j)
        cname[j] = opt.generic_names ? fmt::format("C{:07d}", j + 1) : model.col_name(j);
    for (int i = 0; i < m; ++i)
        rname[i] = opt.generic_names ? fmt::format("R{:07d}", i + 1) : model.row_name(i);
    if (!opt.generic_names) {
        for (int j = 0; j < n; ++j)
            if (!plain_name(cname[j]))
                throw Error(ErrorKind::ValidationError,
                            "column name '" + cname[j] + "' is not MPS-safe; use generic names");
        for (int i = 0; i < m; ++i)
            if (!plain_name(rname[i]))
                throw Error(ErrorKind::ValidationError,
                            "row name '" + rname[i] + "' is not MPS-safe; use generic names");
    }
    std::string obj = "OBJ";
    while (model.find_row(obj) && !opt.generic_names)
        obj += '_';

    out << "NAME          " << opt.problem_name << "\n";
    out << "ROWS\n";
    out << " N  " << obj << "\n";
    for (int i = 0; i < m; ++i)
        out << ' ' << sense_letter(model.row_sense(i)) << "  " << rname[i] << "\n";

    out << "COLUMNS\n";
    const CscMatrix a = model.column_matrix();
    bool in_int = false;
    auto emit_marker = [&](const char* kind) {
        out << "    MARKER                 'MARKER'                 '" << kind << "'\n";
    };
    for (int j = 0; j < n; ++j) {
        if (model.is_binary(j) != in_int) {
            emit_marker(in_int ? "INTEND" : "INTORG");
            in_int = !in_int;
        }
        const bool empty = a.start[j] == a.start[j + 1];
        if (model.cost(j) != 0.0 || empty)
            out << entry("", cname[j], obj, num(model.cost(j)));
        for (int k = a.start[j]; k < a.start[j + 1]; ++k)
            out << entry("", cname[j], rname[a.index[k]], num(a.value[k]));
    }
    if (in_int)
        emit_marker("INTEND");

    out << "RHS\n";
    if (model.objective_constant() != 0.0)
        out << entry("", "RHS", obj, num(-model.objective_constant()));
    for (int i = 0; i < m; ++i)
        if (model.row_rhs(i) != 0.0)
            out << entry("", "RHS", rname[i], num(model.row_rhs(i)));

    out << "RANGES\n";

    out << "BOUNDS\n";
    for (int j = 0; j < n; ++j) {
        const double lo = model.col_lower(j), hi = model.col_upper(j);
        if (lo == hi) {
            out << entry("FX", "BND", cname[j], num(lo));
            continue;
        }
        if (lo == -kInf && hi == kInf) {
            out << entry("FR", "BND", cname[j], "");
            continue;
        }
        if (lo == -kInf)
            out << entry("MI", "BND", cname[j], "");
        else if (lo != 0.0)
            out << entry("LO", "BND", cname[j], num(lo));
        if (hi != kInf || model.is_binary(j))
            out << entry("UP", "BND", cname[j], num(hi));
    }
    out << "ENDATA\n";
    if (!out)
        throw Error(ErrorKind::IoError, "failed while writing MPS stream");
}

void write_mps(const LpModel& model, const std::filesystem::path& path, const MpsOptions& opt)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "' for writing");
    write_mps(model, out, opt);
    out.close();
    if (!out)
        throw Error(ErrorKind::IoError, "failed to write '" + path.string() + "'");
}

namespace {

double parse_number(const std::string& s, int line)
{
    double v = 0.0;
    const char* first = s.data();
    if (!s.empty() && s[0] == '+')
        ++first;
    auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        if (s == "Inf" || s == "inf" || s == "Infinity" || s == "1e+30" || s == "1e30")
            return kInf;
        if (s == "-Inf" || s == "-inf" || s == "-Infinity")
            return -kInf;
        throw Error(ErrorKind::IoError, fmt::format("line {}: bad number '{}'", line, s));
    }
    if (v >= 1e30)
        return kInf;
    if (v <= -1e30)
        return -kInf;
    return v;
}

}  // namespace

LpModel read_mps(std::istream& in)
{
    enum class Sec { None, Rows, Columns, Rhs, Ranges, Bounds, End } sec = Sec::None;
    LpModel model;
    std::string obj;
    std::unordered_map<std::string, int> rows;  // objective and free rows excluded
    std::unordered_map<std::string, char> skipped;
    std::vector<double> lo, hi;
    std::vector<char> integer, has_up;
    std::string last_col;
    int cur = -1;
    bool in_int = false;

    auto fail = [](int line, const std::string& what) {
        throw Error(ErrorKind::IoError, fmt::format("MPS line {}: {}", line, what));
    };
    auto col_of = [&](const std::string& name, int line) {
        auto j = model.find_col(name);
        if (!j)
            fail(line, "unknown column '" + name + "'");
        return *j;
    };

    std::string text;
    int line = 0;
    std::vector<std::string> tok;
    while (std::getline(in, text)) {
        ++line;
        if (!text.empty() && text.back() == '\r')
            text.pop_back();
        if (text.empty() || text[0] == '*')
            continue;
        tok.clear();
        {
            std::istringstream ss(text);
            std::string t;
            while (ss >> t)
                tok.push_back(t);
        }
        if (tok.empty())
            continue;
        if (!std::isspace(static_cast<unsigned char>(text[0]))) {
            const std::string& h = tok[0];
            if (h == "NAME") sec = Sec::None;
            else if (h == "ROWS") sec = Sec::Rows;
            else if (h == "COLUMNS") sec = Sec::Columns;
            else if (h == "RHS") sec = Sec::Rhs;
            else if (h == "RANGES") sec = Sec::Ranges;
            else if (h == "BOUNDS") sec = Sec::Bounds;
            else if (h == "ENDATA") { sec = Sec::End; break; }
            else fail(line, "unknown section '" + h + "'");
            continue;
        }
        switch (sec) {
        case Sec::Rows: {
            if (tok.size() != 2)
                fail(line, "expected row type and name");
            const char t = static_cast<char>(std::toupper(static_cast<unsigned char>(tok[0][0])));
            if (t == 'N') {
                if (obj.empty())
                    obj = tok[1];
                else
                    skipped.emplace(tok[1], 1);
                break;
            }
            RowSense s = t == 'L' ? RowSense::Le : t == 'G' ? RowSense::Ge : RowSense::Eq;
            if (t != 'L' && t != 'G' && t != 'E')
                fail(line, "bad row type '" + tok[0] + "'");
            rows.emplace(tok[1], model.add_row(tok[1], s, 0.0));
            break;
        }
        case Sec::Columns: {
            if (tok.size() >= 3 && tok[1] == "'MARKER'") {
                if (tok[2] == "'INTORG'")
                    in_int = true;
                else if (tok[2] == "'INTEND'")
                    in_int = false;
                else
                    fail(line, "bad marker");
                break;
            }
            if (tok.size() != 3 && tok.size() != 5)
                fail(line, "expected column, row, value [row, value]");
            if (tok[0] != last_col) {
                if (model.find_col(tok[0]))
                    fail(line, "column '" + tok[0] + "' is not contiguous");
                cur = model.add_column(tok[0], 0.0, kInf);
                lo.push_back(0.0);
                hi.push_back(kInf);
                integer.push_back(in_int ? 1 : 0);
                has_up.push_back(0);
                last_col = tok[0];
            }
            for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
                const double v = parse_number(tok[k + 1], line);
                if (tok[k] == obj) {
                    model.add_cost(cur, v);
                } else if (auto it = rows.find(tok[k]); it != rows.end()) {
                    model.add_coefficient(it->second, cur, v);
                } else if (!skipped.count(tok[k])) {
                    fail(line, "unknown row '" + tok[k] + "'");
                }
            }
            break;
        }
        case Sec::Rhs: {
            const std::size_t first = tok.size() % 2 == 0 ? 0 : 1;
            for (std::size_t k = first; k + 1 < tok.size(); k += 2) {
                const double v = parse_number(tok[k + 1], line);
                if (tok[k] == obj)
                    model.set_objective_constant(-v);
                else if (auto it = rows.find(tok[k]); it != rows.end())
                    model.set_rhs(it->second, v);
                else if (!skipped.count(tok[k]))
                    fail(line, "unknown row '" + tok[k] + "'");
            }
            break;
        }
        case Sec::Ranges:
            fail(line, "ranged rows are not supported");
            break;
        case Sec::Bounds: {
            std::string type = tok[0];
            for (char& ch : type)
                ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
            const bool valued = type != "FR" && type != "MI" && type != "PL" && type != "BV";
            const std::size_t name_at = valued ? (tok.size() == 4 ? 2 : 1) : (tok.size() == 3 ? 2 : 1);
            if (name_at >= tok.size() || (valued && name_at + 1 >= tok.size()))
                fail(line, "malformed bound");
            const int j = col_of(tok[name_at], line);
            const double v = valued ? parse_number(tok[name_at + 1], line) : 0.0;
            if (type == "UP") {
                if (v < 0.0 && lo[j] == 0.0)
                    lo[j] = -kInf;
                hi[j] = v;
                has_up[j] = 1;
            } else if (type == "LO") {
                lo[j] = v;
            } else if (type == "FX") {
                lo[j] = hi[j] = v;
                has_up[j] = 1;
            } else if (type == "FR") {
                lo[j] = -kInf;
                hi[j] = kInf;
            } else if (type == "MI") {
                lo[j] = -kInf;
            } else if (type == "PL") {
                hi[j] = kInf;
            } else if (type == "BV") {
                lo[j] = 0.0;
                hi[j] = 1.0;
                integer[j] = 1;
                has_up[j] = 1;
            } else {
                fail(line, "unsupported bound type '" + type + "'");
            }
            break;
        }
        default:
            fail(line, "data outside a section");
        }
    }
    if (sec != Sec::End)
        throw Error(ErrorKind::IoError, "MPS input ended without ENDATA");

    for (int j = 0; j < model.num_cols(); ++j) {
        if (integer[j]) {
            if (!has_up[j])
                hi[j] = 1.0;
            if (lo[j] < 0.0 || hi[j] > 1.0)
                throw Error(ErrorKind::IoError,
                            "column '" + model.col_name(j) + "' is a general integer");
            model.set_binary(j, true);
        }
        model.set_bounds(j, lo[j], hi[j]);
    }
    model.validate();
    return model;
}

LpModel read_mps(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "'");
    return read_mps(in);
}

}  // namespace capexp::lp
