#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace capexp {

enum class ErrorKind {
    // data_ingest
    MissingColumn,
    RowCountMismatch,
    ValueOutOfRange,
    NonNumeric,
    OutOfRange,
    // unit_models
    InvalidParams,
    // cluster_uc
    TooManyUnits,
    InconsistentStatuses,
    InvalidInitialState,
    NotOptimal,
    // csp_thermal
    InvalidState,
    // expansion_model
    MissingSeries,
    InfeasibleBounds,
    StatusNotOptimal,
    ResidualTooLarge,
    // lp_core
    ValidationError,
    IoError,
    UnknownColumn,
    // metrics
    ZeroEnergy,
    NonPositiveIndex,
    // scenario_cli
    SolveFailed,
    BudgetExceeded,
    MissingBase,
};

std::string_view to_string(ErrorKind kind);

/// Every recoverable failure in the library surfaces as an Error carrying a
/// machine-readable kind; the message names the offending row/column/field.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace capexp
