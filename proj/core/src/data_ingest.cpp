#include "capexp/data_ingest.hpp"

#include <fmt/format.h>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>

#include "capexp/error.hpp"
#include "csv.hpp"

namespace capexp {

namespace {

enum Col { Hour, DemandE, DemandH, Wind, Pv, Csp, Dni, NumCols };

constexpr std::array<const char*, NumCols> kNames = {"hour",  "demand_e_mw", "demand_h_mw", "cf_wind",
                                                     "cf_pv", "cf_csp",      "dni_kw_m2"};

struct Range {
    double lo, hi;
};

Range range_of(int col)
{
    switch (col) {
    case Wind:
    case Pv:
    case Csp:
        return {0.0, 1.0};
    default:
        return {0.0, INFINITY};
    }
}

void check_value(double v, int row, int col)
{
    if (!std::isfinite(v))
        throw Error(ErrorKind::NonNumeric, fmt::format("row {}, column {}: non-finite value", row, kNames[col]));
    const Range r = range_of(col);
    if (v < r.lo || v > r.hi)
        throw Error(ErrorKind::ValueOutOfRange,
                    fmt::format("row {}, column {}: {} outside [{}, {}]", row, kNames[col], v, r.lo, r.hi));
}

const std::vector<double>& series(const TimeSeriesBundle& b, int col)
{
    switch (col) {
    case DemandE: return b.demand_electric;
    case DemandH: return b.demand_heat;
    case Wind: return b.cf_wind;
    case Pv: return b.cf_pv;
    case Csp: return b.cf_csp;
    default: return b.dni;
    }
}

std::vector<double>& series(TimeSeriesBundle& b, int col)
{
    return const_cast<std::vector<double>&>(series(static_cast<const TimeSeriesBundle&>(b), col));
}

}  // namespace

void TimeSeriesBundle::validate() const
{
    if (horizon_hours < 1)
        throw Error(ErrorKind::RowCountMismatch, "bundle horizon must be at least one hour");
    if (!(dt_hours > 0.0) || !std::isfinite(dt_hours))
        throw Error(ErrorKind::ValueOutOfRange, "dt_hours must be positive");
    for (int c = DemandE; c < NumCols; ++c) {
        const auto& s = series(*this, c);
        if (static_cast<int>(s.size()) != horizon_hours)
            throw Error(ErrorKind::RowCountMismatch,
                        fmt::format("series {} has {} entries, horizon is {}", kNames[c], s.size(), horizon_hours));
        for (int t = 0; t < horizon_hours; ++t)
            check_value(s[t], t + 1, c);
    }
}

TimeSeriesBundle load_bundle(std::istream& in, int horizon)
{
    std::vector<std::string> rec;
    if (!csv::read_record(in, rec))
        throw Error(ErrorKind::MissingColumn, "empty file: no header");
    std::array<std::optional<int>, NumCols> where{};
    for (int k = 0; k < static_cast<int>(rec.size()); ++k) {
        std::string_view name = csv::trim(rec[k]);
        if (k == 0 && name.starts_with("\xEF\xBB\xBF"))
            name.remove_prefix(3);  // UTF-8 byte order mark
        for (int c = 0; c < NumCols; ++c)
            if (name == kNames[c])
                where[c] = k;
    }
    for (int c = 0; c < NumCols; ++c)
        if (!where[c] && c != Csp && c != Dni)
            throw Error(ErrorKind::MissingColumn, fmt::format("column '{}' not in header", kNames[c]));
    if (where[Csp].has_value() != where[Dni].has_value())
        throw Error(ErrorKind::MissingColumn,
                    fmt::format("column '{}' not in header", where[Csp] ? kNames[Dni] : kNames[Csp]));

    TimeSeriesBundle b;
    b.has_csp = where[Csp].has_value();
    int row = 0;
    while (csv::read_record(in, rec)) {
        if (rec.size() == 1 && csv::trim(rec[0]).empty())
            continue;  // blank line, typically the trailing newline
        ++row;
        for (int c = 0; c < NumCols; ++c) {
            if (!where[c])
                continue;
            if (*where[c] >= static_cast<int>(rec.size()))
                throw Error(ErrorKind::NonNumeric, fmt::format("row {}, column {}: missing value", row, kNames[c]));
            const std::string_view text = csv::trim(rec[*where[c]]);
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
            if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
                throw Error(ErrorKind::NonNumeric,
                            fmt::format("row {}, column {}: '{}' is not a number", row, kNames[c], text));
            if (c == Hour)
                continue;
            check_value(v, row, c);
            series(b, c).push_back(v);
        }
    }
    if (horizon > 0 && row != horizon)
        throw Error(ErrorKind::RowCountMismatch, fmt::format("found {} rows, expected {}", row, horizon));
    b.horizon_hours = row;
    if (!b.has_csp) {
        b.cf_csp.assign(row, 0.0);
        b.dni.assign(row, 0.0);
    }
    b.validate();
    return b;
}

TimeSeriesBundle load_bundle(const std::filesystem::path& path, int horizon)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "'");
    return load_bundle(in, horizon);
}

void write_bundle(const TimeSeriesBundle& b, std::ostream& out)
{
    b.validate();
    const int last = b.has_csp ? NumCols : Csp;
    for (int c = 0; c < last; ++c)
        out << (c ? "," : "") << kNames[c];
    out << '\n';
    for (int t = 0; t < b.horizon_hours; ++t) {
        out << t;
        for (int c = DemandE; c < last; ++c)
            out << ',' << fmt::format("{}", series(b, c)[t]);
        out << '\n';
    }
    if (!out)
        throw Error(ErrorKind::IoError, "failed while writing bundle");
}

void write_bundle(const TimeSeriesBundle& b, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "' for writing");
    write_bundle(b, out);
}

std::vector<double> project_demand(std::span<const double> base, int years, double growth_rate)
{
    if (!(growth_rate > -1.0))
        throw Error(ErrorKind::ValueOutOfRange, "growth_rate must exceed -1");
    if (years < 0)
        throw Error(ErrorKind::ValueOutOfRange, "years must be non-negative");
    const double f = std::pow(1.0 + growth_rate, years);
    std::vector<double> out(base.begin(), base.end());
    for (double& v : out)
        v *= f;
    return out;
}

TimeSeriesBundle slice_bundle(const TimeSeriesBundle& b, int start, int len)
{
    if (start < 0 || len < 1 || start > b.horizon_hours - len)
        throw Error(ErrorKind::OutOfRange,
                    fmt::format("slice [{}, {}) outside horizon of {} hours", start, start + len, b.horizon_hours));
    TimeSeriesBundle s = b;
    s.horizon_hours = len;
    for (int c = DemandE; c < NumCols; ++c) {
        const auto& src = series(b, c);
        series(s, c).assign(src.begin() + start, src.begin() + start + len);
    }
    return s;
}

}  // namespace capexp
