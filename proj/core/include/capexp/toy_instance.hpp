#pragma once

#include <cstdint>
#include <filesystem>

#include "capexp/data_ingest.hpp"
#include "capexp/expansion_model.hpp"
#include "capexp/unit_models.hpp"

namespace capexp {

/// Desk-scale synthetic system: hourly series plus a reduced parameter
/// library (one coal, one CHP and one CSP group).
struct ToyInstance {
    TimeSeriesBundle bundle;
    ParameterLibrary library;
};

/// Seeded diurnal and seasonal demand, wind and PV capacity factors, DNI and
/// CSP availability. Without Tech::Csp in techs the bundle has no CSP
/// series. Throws Error(InvalidParams) when T < 24.
ToyInstance make_toy_instance(std::uint64_t seed, int T, TechSet techs);

/// Writes bundle.csv and params.json (full library in the override schema)
/// into dir, creating it if needed.
void write_toy_instance(const ToyInstance& toy, const std::filesystem::path& dir);

}  // namespace capexp
