#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace reachmax {

enum class Errc {
    NonSquare,
    NotDiagonalizable,
    NotConvergent,
    NotHermitian,
    Singular,
    DimensionMismatch,
    DimensionTooLarge,
    NotConvexForm,
    EmptyVertexList,
    Infeasible,
    NotConcave,
    UnsupportedObjective,
    UnsupportedSet,
    AssumptionViolated,
    NonPositiveNu,
    SingularShift,
    GenerationExhausted,
    InvalidInput,
};

constexpr std::string_view to_string(Errc code) noexcept {
    switch (code) {
    case Errc::NonSquare: return "NonSquare";
    case Errc::NotDiagonalizable: return "NotDiagonalizable";
    case Errc::NotConvergent: return "NotConvergent";
    case Errc::NotHermitian: return "NotHermitian";
    case Errc::Singular: return "Singular";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::DimensionTooLarge: return "DimensionTooLarge";
    case Errc::NotConvexForm: return "NotConvexForm";
    case Errc::EmptyVertexList: return "EmptyVertexList";
    case Errc::Infeasible: return "Infeasible";
    case Errc::NotConcave: return "NotConcave";
    case Errc::UnsupportedObjective: return "UnsupportedObjective";
    case Errc::UnsupportedSet: return "UnsupportedSet";
    case Errc::AssumptionViolated: return "AssumptionViolated";
    case Errc::NonPositiveNu: return "NonPositiveNu";
    case Errc::SingularShift: return "SingularShift";
    case Errc::GenerationExhausted: return "GenerationExhausted";
    case Errc::InvalidInput: return "InvalidInput";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the Errc codes above.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    [[nodiscard]] Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace reachmax
