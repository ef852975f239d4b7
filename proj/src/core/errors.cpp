#include "sybilid/errors.hpp"

#include <array>
#include <utility>

namespace sybilid {

namespace {

constexpr std::array<std::pair<ErrorCode, std::string_view>, 24> kNames{{
    {ErrorCode::Ok, "Ok"},
    {ErrorCode::InvalidInput, "InvalidInput"},
    {ErrorCode::InvalidScalar, "InvalidScalar"},
    {ErrorCode::InvalidSignature, "InvalidSignature"},
    {ErrorCode::EncodingError, "EncodingError"},
    {ErrorCode::UnknownRelation, "UnknownRelation"},
    {ErrorCode::UnsatisfiedRelation, "UnsatisfiedRelation"},
    {ErrorCode::SchemaError, "SchemaError"},
    {ErrorCode::RelationMismatch, "RelationMismatch"},
    {ErrorCode::CapacityExceeded, "CapacityExceeded"},
    {ErrorCode::NotFound, "NotFound"},
    {ErrorCode::StaleRoot, "StaleRoot"},
    {ErrorCode::Revoked, "Revoked"},
    {ErrorCode::ChallengeMismatch, "ChallengeMismatch"},
    {ErrorCode::IssuanceAudit, "IssuanceAudit"},
    {ErrorCode::Conflict, "Conflict"},
    {ErrorCode::AlreadyAssociated, "AlreadyAssociated"},
    {ErrorCode::StaleAssociation, "StaleAssociation"},
    {ErrorCode::Unauthorized, "Unauthorized"},
    {ErrorCode::DuplicateNullifier, "DuplicateNullifier"},
    {ErrorCode::Blocked, "Blocked"},
    {ErrorCode::ScriptError, "ScriptError"},
    {ErrorCode::LogError, "LogError"},
    {ErrorCode::IoError, "IoError"},
}};

} // namespace

std::string_view to_string(ErrorCode code) noexcept {
    for (const auto& [c, name] : kNames) {
        if (c == code) return name;
    }
    return "Unknown";
}

bool parse_error_code(std::string_view name, ErrorCode& out) noexcept {
    for (const auto& [c, n] : kNames) {
        if (n == name) {
            out = c;
            return true;
        }
    }
    return false;
}

} // namespace sybilid
