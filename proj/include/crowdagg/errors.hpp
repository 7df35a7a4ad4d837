#pragma once

#include <stdexcept>
#include <string>

namespace crowdagg {

enum class ErrorCode {
    MalformedRow,
    GradeOutOfRange,
    DuplicateResponse,
    UnknownCondition,
    NotEnoughEligibleWorkers,
    ShapeMismatch,
    LengthMismatch,
    NonFiniteObjective,
    DegenerateSample,
    ConstantInput,
    EmptyCondition,
    MissingCoverage,
    UnsupportedKind,
    IoError,
    ConfigError,
};

const char* error_code_name(ErrorCode code);

/// Exit-code class used by the CLI: 1 = usage, 2 = data, 3 = numerical.
int error_exit_code(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const { return code_; }
    const char* code_name() const { return error_code_name(code_); }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace crowdagg
