#include "naphtha/error.hpp"

namespace naphtha {

const char* error_code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::AllZero: return "AllZero";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NonPositiveInput: return "NonPositiveInput";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::MissingGradient: return "MissingGradient";
    case ErrorCode::FingerprintMismatch: return "FingerprintMismatch";
    case ErrorCode::CorruptTensor: return "CorruptTensor";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::DegenerateConfig: return "DegenerateConfig";
    case ErrorCode::ConstantTruth: return "ConstantTruth";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    }
    return "Unknown";
}

bool is_numerical_failure(ErrorCode code) {
    switch (code) {
    case ErrorCode::BracketFailure:
    case ErrorCode::NonFiniteValue:
    case ErrorCode::NonFiniteLoss:
        return true;
    default:
        return false;
    }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

} // namespace naphtha
