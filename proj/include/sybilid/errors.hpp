#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sybilid {

// Numeric values are part of the C ABI (see sybilid.h); append only.
enum class ErrorCode : int {
    Ok = 0,
    InvalidInput = 1,
    InvalidScalar = 2,
    InvalidSignature = 3,
    EncodingError = 4,
    UnknownRelation = 5,
    UnsatisfiedRelation = 6,
    SchemaError = 7,
    RelationMismatch = 8,
    CapacityExceeded = 9,
    NotFound = 10,
    StaleRoot = 11,
    Revoked = 12,
    ChallengeMismatch = 13,
    IssuanceAudit = 14,
    Conflict = 15,
    AlreadyAssociated = 16,
    StaleAssociation = 17,
    Unauthorized = 18,
    DuplicateNullifier = 19,
    Blocked = 20,
    ScriptError = 21,
    LogError = 22,
    IoError = 23,
};

std::string_view to_string(ErrorCode code) noexcept;

// Inverse of to_string; returns false for unknown names.
bool parse_error_code(std::string_view name, ErrorCode& out) noexcept;

class ProtocolError : public std::runtime_error {
public:
    ProtocolError(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw ProtocolError(code, std::string(to_string(code)) + ": " + what);
}

} // namespace sybilid
