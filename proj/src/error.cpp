#include "fmxwb/error.hpp"

namespace fmxwb {

const char* error_code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::NotFmx: return "NotFmx";
    case ErrorCode::Truncated: return "Truncated";
    case ErrorCode::KeyLength: return "KeyLength";
    case ErrorCode::BlockSize: return "BlockSize";
    case ErrorCode::Alignment: return "Alignment";
    case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownName: return "UnknownName";
    case ErrorCode::InvalidRange: return "InvalidRange";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::UnknownHandler: return "UnknownHandler";
    case ErrorCode::UnknownService: return "UnknownService";
    case ErrorCode::ForbiddenService: return "ForbiddenService";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::EmptyCapture: return "EmptyCapture";
    case ErrorCode::Internal: return "Internal";
    }
    return "Unknown";
}

} // namespace fmxwb
