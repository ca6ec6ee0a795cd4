#pragma once

#include <stdexcept>
#include <string>

namespace cdcp {

enum class ErrorCode {
    DivergentTransform,
    InvalidTilt,
    NoPositiveRoot,
    OutOfDomain,
    GridTooCoarse,
    HorizonExceedsRegime,
    QuadratureNotConverged,
    UnboundedRate,
    DominationViolated,
    OutOfHorizon,
    InsufficientPaths,
    ConfigInvalid,
    Overflow,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const { return code_; }

    // Exit-code taxonomy used by the C API and the CLI: config errors (2),
    // infeasible regime/tilt (3), numerical failures (4).
    int exit_class() const {
        switch (code_) {
            case ErrorCode::ConfigInvalid:
                return 2;
            case ErrorCode::InvalidTilt:
            case ErrorCode::NoPositiveRoot:
            case ErrorCode::HorizonExceedsRegime:
                return 3;
            default:
                return 4;
        }
    }

private:
    ErrorCode code_;
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::DivergentTransform: return "DivergentTransform";
        case ErrorCode::InvalidTilt: return "InvalidTilt";
        case ErrorCode::NoPositiveRoot: return "NoPositiveRoot";
        case ErrorCode::OutOfDomain: return "OutOfDomain";
        case ErrorCode::GridTooCoarse: return "GridTooCoarse";
        case ErrorCode::HorizonExceedsRegime: return "HorizonExceedsRegime";
        case ErrorCode::QuadratureNotConverged: return "QuadratureNotConverged";
        case ErrorCode::UnboundedRate: return "UnboundedRate";
        case ErrorCode::DominationViolated: return "DominationViolated";
        case ErrorCode::OutOfHorizon: return "OutOfHorizon";
        case ErrorCode::InsufficientPaths: return "InsufficientPaths";
        case ErrorCode::ConfigInvalid: return "ConfigInvalid";
        case ErrorCode::Overflow: return "Overflow";
    }
    return "Unknown";
}

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, std::string(error_code_name(code)) + ": " + what);
}

}  // namespace cdcp
