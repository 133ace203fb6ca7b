#pragma once

#include <stdexcept>
#include <string>

namespace tubeh {

enum class ErrorKind {
    NonRegularCone,
    EmptySample,
    DegenerateSubcone,
    InvalidP,
    ZeroField,
    InvalidGrid,
    PointOutsideTube,
    QuadratureNotConverged,
    TailTooFat,
    NotConverging,
    DecayCheckFailed,
    OverflowGuard,
    ChainBroken,
    IdentityBroken,
    BoundViolated,
    DescriptorInvalid,
    IoError,
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::NonRegularCone: return "NonRegularCone";
        case ErrorKind::EmptySample: return "EmptySample";
        case ErrorKind::DegenerateSubcone: return "DegenerateSubcone";
        case ErrorKind::InvalidP: return "InvalidP";
        case ErrorKind::ZeroField: return "ZeroField";
        case ErrorKind::InvalidGrid: return "InvalidGrid";
        case ErrorKind::PointOutsideTube: return "PointOutsideTube";
        case ErrorKind::QuadratureNotConverged: return "QuadratureNotConverged";
        case ErrorKind::TailTooFat: return "TailTooFat";
        case ErrorKind::NotConverging: return "NotConverging";
        case ErrorKind::DecayCheckFailed: return "DecayCheckFailed";
        case ErrorKind::OverflowGuard: return "OverflowGuard";
        case ErrorKind::ChainBroken: return "ChainBroken";
        case ErrorKind::IdentityBroken: return "IdentityBroken";
        case ErrorKind::BoundViolated: return "BoundViolated";
        case ErrorKind::DescriptorInvalid: return "DescriptorInvalid";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

/** @brief Library error carrying a machine-readable kind. */
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace tubeh
