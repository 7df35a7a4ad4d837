#include "crowdagg/errors.hpp"

namespace crowdagg {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::MalformedRow: return "MalformedRow";
        case ErrorCode::GradeOutOfRange: return "GradeOutOfRange";
        case ErrorCode::DuplicateResponse: return "DuplicateResponse";
        case ErrorCode::UnknownCondition: return "UnknownCondition";
        case ErrorCode::NotEnoughEligibleWorkers: return "NotEnoughEligibleWorkers";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::NonFiniteObjective: return "NonFiniteObjective";
        case ErrorCode::DegenerateSample: return "DegenerateSample";
        case ErrorCode::ConstantInput: return "ConstantInput";
        case ErrorCode::EmptyCondition: return "EmptyCondition";
        case ErrorCode::MissingCoverage: return "MissingCoverage";
        case ErrorCode::UnsupportedKind: return "UnsupportedKind";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "UnknownError";
}

int error_exit_code(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonFiniteObjective:
            return 3;
        case ErrorCode::ConfigError:
            return 1;
        default:
            return 2;
    }
}

}  // namespace crowdagg
