#pragma once

#include <stdexcept>
#include <string>

namespace simplex {

enum class ErrorCode {
    NegativeComponent,
    SumViolation,
    InvalidParameter,
    DirichletConstraintViolated,
    SingularNesting,
    EvaluationFailure,
    NotPositiveSemiDefinite,
    DegenerateState,
    EnsembleTooSmall,
    InsufficientSnapshots,
    Unsupported,
    ConfigError,
};

const char* to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI exit-code mapping) can branch without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace simplex
