#pragma once

#include <stdexcept>
#include <string>

namespace taxotrace {

enum class ErrorCode {
    DuplicateCodecId,
    UnknownCodecId,
    DuplicateUtteranceId,
    ParseError,
    IoError,
    SampleRateMismatch,
    EmptyCategory,
    MissingLabel,
    NonFiniteLoss,
    VersionMismatch,
    DegenerateLabels,
    EmptyInput,
    NoActiveHeads,
    MissingUtterance,
    InvalidArgument,
};

const char* error_code_name(ErrorCode code);

/// All module errors are thrown as TraceError carrying a stable code name,
/// so the CLI can emit one machine-parseable line per failure.
class TraceError : public std::runtime_error {
public:
    TraceError(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

}  // namespace taxotrace
