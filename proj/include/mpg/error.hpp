#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mpg {

enum class ErrorCode {
    InvalidFormat,
    MissingKey,
    UnknownState,
    DuplicateEntry,
    ProbabilityRowInvalid,
    EmptyActionSet,
    InvalidArgument,
    StateCapExceeded,
    NotInFamily,
    NotDeterministic,
    NoCircuit,
    EmptyRow,
    NotStochastic,
    SingularSystem,
    EnumerationCapExceeded,
    CycleDetected,
    NoEigenpair,
    MaxOuterIterationsExceeded,
    CircuitCapExceeded,
    InvalidSlice,
    NotStructurallySolvable,
};

std::string_view to_string(ErrorCode code);

/// True for errors caused by malformed input rather than by a solver.
bool is_validation_error(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace mpg
