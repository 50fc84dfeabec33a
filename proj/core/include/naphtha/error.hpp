#pragma once

#include <stdexcept>
#include <string>

namespace naphtha {

// Every failure the library can raise, by contract name. The CLI maps these
// onto exit codes: data errors -> 2, numerical failures -> 3.
enum class ErrorCode {
    AllZero,
    NegativeEntry,
    NonFinite,
    NonPositiveInput,
    BracketFailure,
    IoFailure,
    SchemaMismatch,
    InvariantViolation,
    ShapeMismatch,
    NonFiniteValue,
    MissingGradient,
    FingerprintMismatch,
    CorruptTensor,
    TooFewSamples,
    DegenerateConfig,
    ConstantTruth,
    NonFiniteLoss,
};

const char* error_code_name(ErrorCode code);

// True for failures of the numerics themselves (as opposed to bad inputs).
bool is_numerical_failure(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

} // namespace naphtha
