#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pupilcover {

enum class ErrorCode {
    invalid_input,
    concentric_disks,
    nested_disks,
    degenerate_triple,
    no_coverage,
    infeasible,
    unbounded,
    iteration_limit,
    search_space_too_large,
    not_prime,
    invalid_radius,
    singular_system,
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::invalid_input: return "InvalidInput";
    case ErrorCode::concentric_disks: return "ConcentricDisks";
    case ErrorCode::nested_disks: return "NestedDisks";
    case ErrorCode::degenerate_triple: return "DegenerateTriple";
    case ErrorCode::no_coverage: return "NoCoverage";
    case ErrorCode::infeasible: return "Infeasible";
    case ErrorCode::unbounded: return "Unbounded";
    case ErrorCode::iteration_limit: return "IterationLimit";
    case ErrorCode::search_space_too_large: return "SearchSpaceTooLarge";
    case ErrorCode::not_prime: return "NotPrime";
    case ErrorCode::invalid_radius: return "InvalidRadius";
    case ErrorCode::singular_system: return "SingularSystem";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace pupilcover
