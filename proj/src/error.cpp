#include "taxotrace/error.hpp"

namespace taxotrace {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::DuplicateCodecId: return "DuplicateCodecId";
        case ErrorCode::UnknownCodecId: return "UnknownCodecId";
        case ErrorCode::DuplicateUtteranceId: return "DuplicateUtteranceId";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::SampleRateMismatch: return "SampleRateMismatch";
        case ErrorCode::EmptyCategory: return "EmptyCategory";
        case ErrorCode::MissingLabel: return "MissingLabel";
        case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
        case ErrorCode::VersionMismatch: return "VersionMismatch";
        case ErrorCode::DegenerateLabels: return "DegenerateLabels";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::NoActiveHeads: return "NoActiveHeads";
        case ErrorCode::MissingUtterance: return "MissingUtterance";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "UnknownError";
}

}  // namespace taxotrace
