#pragma once

#include <stdexcept>
#include <string>

namespace fmxwb {

enum class ErrorCode {
    NotFmx = 1,
    Truncated = 2,
    KeyLength = 3,
    BlockSize = 4,
    Alignment = 5,
    ChecksumMismatch = 6,
    ParseError = 7,
    UnknownName = 8,
    InvalidRange = 9,
    InvalidConfig = 10,
    IoError = 11,
    UnknownHandler = 12,
    UnknownService = 13,
    ForbiddenService = 14,
    SchemaError = 15,
    EmptyCapture = 16,
    Internal = 17,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, std::string message) {
    throw Error(code, std::move(message));
}

} // namespace fmxwb
