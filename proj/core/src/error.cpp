#include "capexp/error.hpp"

namespace capexp {

std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::MissingColumn: return "MissingColumn";
    case ErrorKind::RowCountMismatch: return "RowCountMismatch";
    case ErrorKind::ValueOutOfRange: return "ValueOutOfRange";
    case ErrorKind::NonNumeric: return "NonNumeric";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::TooManyUnits: return "TooManyUnits";
    case ErrorKind::InconsistentStatuses: return "InconsistentStatuses";
    case ErrorKind::InvalidInitialState: return "InvalidInitialState";
    case ErrorKind::NotOptimal: return "NotOptimal";
    case ErrorKind::InvalidState: return "InvalidState";
    case ErrorKind::MissingSeries: return "MissingSeries";
    case ErrorKind::InfeasibleBounds: return "InfeasibleBounds";
    case ErrorKind::StatusNotOptimal: return "StatusNotOptimal";
    case ErrorKind::ResidualTooLarge: return "ResidualTooLarge";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::UnknownColumn: return "UnknownColumn";
    case ErrorKind::ZeroEnergy: return "ZeroEnergy";
    case ErrorKind::NonPositiveIndex: return "NonPositiveIndex";
    case ErrorKind::SolveFailed: return "SolveFailed";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::MissingBase: return "MissingBase";
    }
    return "Error";
}

}  // namespace capexp
