#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace capexp {

/// Hourly inputs for one planning horizon. Demands in MW / MW-th, capacity
/// factors as fractions, DNI in kW/m^2.
struct TimeSeriesBundle {
    int horizon_hours = 0;
    double dt_hours = 1.0;
    std::vector<double> demand_electric;
    std::vector<double> demand_heat;
    std::vector<double> cf_wind;
    std::vector<double> cf_pv;
    std::vector<double> cf_csp;
    std::vector<double> dni;
    /// False when the source had no cf_csp/dni columns; both series are then
    /// zero-filled and the bundle cannot feed a CSP group.
    bool has_csp = true;

    /// Throws Error(RowCountMismatch | ValueOutOfRange | NonNumeric).
    void validate() const;

    bool operator==(const TimeSeriesBundle&) const = default;
};

/// Canonical header, in the order write_bundle emits it.
inline constexpr const char* kBundleHeader = "hour,demand_e_mw,demand_h_mw,cf_wind,cf_pv,cf_csp,dni_kw_m2";

/// Reads the hourly CSV. Column order is free; cf_csp and dni_kw_m2 may both
/// be absent. horizon <= 0 accepts whatever row count the file provides.
/// Throws Error(MissingColumn | RowCountMismatch | ValueOutOfRange | NonNumeric | IoError).
TimeSeriesBundle load_bundle(const std::filesystem::path& path, int horizon);
TimeSeriesBundle load_bundle(std::istream& in, int horizon);

/// Writes values with round-trip precision; CSP columns are omitted when
/// the bundle has none.
void write_bundle(const TimeSeriesBundle& bundle, const std::filesystem::path& path);
void write_bundle(const TimeSeriesBundle& bundle, std::ostream& out);

/// Scales every entry by (1 + growth_rate)^years.
std::vector<double> project_demand(std::span<const double> base, int years, double growth_rate);

/// Contiguous sub-horizon [start, start + len). Throws Error(OutOfRange).
TimeSeriesBundle slice_bundle(const TimeSeriesBundle& bundle, int start, int len);

}  // namespace capexp
