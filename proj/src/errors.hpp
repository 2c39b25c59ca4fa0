#pragma once

#include <stdexcept>
#include <string>

namespace cantordist {

// Failure classes, grouped by the exit status they map to at the tool
// boundary: config/domain errors (4), exhausted search budgets (2),
// verification rejections (3), everything else internal (1).
enum class Errc {
    InvalidModel,
    InvalidInterval,
    InvalidAddress,
    EmptyRestriction,
    MalformedSpec,
    DuplicatePoint,
    NotEnoughCells,
    DegeneratePin,
    SkeletonConflict,
    EmptyIntersection,
    BudgetExhausted,
    DepthTooLarge,
    AdmissibilityFailure,
    NoRealization,
    ConfigError,
    VerifyFailure,
    Internal,
};

const char* errc_name(Errc c);

class DomainError : public std::runtime_error {
  public:
    DomainError(Errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}
    Errc code() const { return code_; }

  private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
    throw DomainError(code, message);
}

inline const char* errc_name(Errc c) {
    switch (c) {
        case Errc::InvalidModel: return "InvalidModel";
        case Errc::InvalidInterval: return "InvalidInterval";
        case Errc::InvalidAddress: return "InvalidAddress";
        case Errc::EmptyRestriction: return "EmptyRestriction";
        case Errc::MalformedSpec: return "MalformedSpec";
        case Errc::DuplicatePoint: return "DuplicatePoint";
        case Errc::NotEnoughCells: return "NotEnoughCells";
        case Errc::DegeneratePin: return "DegeneratePin";
        case Errc::SkeletonConflict: return "SkeletonConflict";
        case Errc::EmptyIntersection: return "EmptyIntersection";
        case Errc::BudgetExhausted: return "BudgetExhausted";
        case Errc::DepthTooLarge: return "DepthTooLarge";
        case Errc::AdmissibilityFailure: return "AdmissibilityFailure";
        case Errc::NoRealization: return "NoRealization";
        case Errc::ConfigError: return "ConfigError";
        case Errc::VerifyFailure: return "VerifyFailure";
        case Errc::Internal: return "Internal";
    }
    return "Unknown";
}

}  // namespace cantordist
