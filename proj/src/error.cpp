#include "mpg/error.hpp"

namespace mpg {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidFormat: return "InvalidFormat";
    case ErrorCode::MissingKey: return "MissingKey";
    case ErrorCode::UnknownState: return "UnknownState";
    case ErrorCode::DuplicateEntry: return "DuplicateEntry";
    case ErrorCode::ProbabilityRowInvalid: return "ProbabilityRowInvalid";
    case ErrorCode::EmptyActionSet: return "EmptyActionSet";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::StateCapExceeded: return "StateCapExceeded";
    case ErrorCode::NotInFamily: return "NotInFamily";
    case ErrorCode::NotDeterministic: return "NotDeterministic";
    case ErrorCode::NoCircuit: return "NoCircuit";
    case ErrorCode::EmptyRow: return "EmptyRow";
    case ErrorCode::NotStochastic: return "NotStochastic";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::EnumerationCapExceeded: return "EnumerationCapExceeded";
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::NoEigenpair: return "NoEigenpair";
    case ErrorCode::MaxOuterIterationsExceeded: return "MaxOuterIterationsExceeded";
    case ErrorCode::CircuitCapExceeded: return "CircuitCapExceeded";
    case ErrorCode::InvalidSlice: return "InvalidSlice";
    case ErrorCode::NotStructurallySolvable: return "NotStructurallySolvable";
    }
    return "Unknown";
}

bool is_validation_error(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidFormat:
    case ErrorCode::MissingKey:
    case ErrorCode::UnknownState:
    case ErrorCode::DuplicateEntry:
    case ErrorCode::ProbabilityRowInvalid:
    case ErrorCode::EmptyActionSet:
    case ErrorCode::InvalidArgument:
    case ErrorCode::NotInFamily:
    case ErrorCode::NotDeterministic:
    case ErrorCode::EmptyRow:
    case ErrorCode::NotStochastic:
    case ErrorCode::InvalidSlice:
        return true;
    default:
        return false;
    }
}

} // namespace mpg
