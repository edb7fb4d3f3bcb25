#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace feecast {

enum class ErrorCode {
    InvalidArgument,
    MissingColumn,
    MalformedNumber,
    EmptyFile,
    IoFailure,
    RpcUnreachable,
    UnknownBlock,
    MalformedResponse,
    HttpFailure,
    FieldMissing,
    StaleInputs,
    AllMissingColumn,
    EmptyFitSlice,
    LagTooLarge,
    SeriesTooShort,
    ShapeMismatch,
    EmptyInput,
    NonFiniteObjective,
    SingularSystem,
    OptimizerFailure,
    HorizonNonPositive,
    Diverged,
    TooFewRows,
    LengthMismatch,
    ConstantActuals,
    InsufficientRows,
    ConfigError,
};

constexpr std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::MalformedNumber: return "MalformedNumber";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::RpcUnreachable: return "RpcUnreachable";
    case ErrorCode::UnknownBlock: return "UnknownBlock";
    case ErrorCode::MalformedResponse: return "MalformedResponse";
    case ErrorCode::HttpFailure: return "HttpFailure";
    case ErrorCode::FieldMissing: return "FieldMissing";
    case ErrorCode::StaleInputs: return "StaleInputs";
    case ErrorCode::AllMissingColumn: return "AllMissingColumn";
    case ErrorCode::EmptyFitSlice: return "EmptyFitSlice";
    case ErrorCode::LagTooLarge: return "LagTooLarge";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::NonFiniteObjective: return "NonFiniteObjective";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::OptimizerFailure: return "OptimizerFailure";
    case ErrorCode::HorizonNonPositive: return "HorizonNonPositive";
    case ErrorCode::Diverged: return "Diverged";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ConstantActuals: return "ConstantActuals";
    case ErrorCode::InsufficientRows: return "InsufficientRows";
    case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a stable code so callers
/// (and the CLI's one-line error output) can dispatch without parsing text.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code)
    {
    }

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message)
{
    throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message)
{
    if (!condition) {
        fail(code, message);
    }
}

} // namespace feecast
