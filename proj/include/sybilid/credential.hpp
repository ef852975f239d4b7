#pragma once

#include "sybilid/crypto.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sybilid {

enum class ClaimKind : std::uint8_t { Int = 1, Enum = 2, String = 3 };

std::string_view to_string(ClaimKind kind) noexcept;
/// Throws InvalidInput for unknown names.
ClaimKind parse_claim_kind(std::string_view name);

inline constexpr std::int64_t kMaxClaimMagnitude = std::int64_t{1} << 62;
inline constexpr std::size_t kMaxClaimString = 31;

/// Named enumeration tables. Codes are small positive integers.
class EnumRegistry {
public:
    /// Ships "blood" (O, A, B, AB) and "grade" (A..F).
    static EnumRegistry with_builtins();

    /// Throws Conflict if the table already exists, InvalidInput on duplicate labels.
    void add(const std::string& table, const std::vector<std::string>& labels);
    /// Throws EncodingError for an unknown table or label.
    std::uint64_t code(const std::string& table, const std::string& label) const;
    std::optional<std::string> label(const std::string& table, std::uint64_t code) const;
    bool has_table(const std::string& table) const { return tables_.count(table) != 0; }

private:
    std::map<std::string, std::vector<std::string>> tables_;
};

/// Declared type of a claim: what a verifier needs to phrase a predicate about it.
struct ClaimSchema {
    ClaimKind kind = ClaimKind::Int;
    std::string table; // enum table; empty otherwise
};

struct ClaimValue {
    ClaimKind kind = ClaimKind::Int;
    std::string table;
    std::int64_t integer = 0;
    std::string text; // string value or enum label
};

/// Injective per kind. Throws EncodingError on oversize or unregistered values.
FieldElement encode_claim_value(const Deployment& d, const EnumRegistry& enums, const ClaimValue& value);

FieldElement claim_key_digest(const Deployment& d, const std::string& key);

struct Claim {
    std::string key;
    ClaimValue value;
    FieldElement key_digest;
    FieldElement kind_code;
    FieldElement encoded;
};

Claim make_claim(const Deployment& d, const EnumRegistry& enums, const std::string& key, const ClaimValue& value);

/// Claim as it appears inside relations: three field elements.
struct EncodedClaim {
    FieldElement key_digest;
    FieldElement kind;
    FieldElement value;
};

/// Relation-level view of a credential: [issuer_id, holder_id, (key, kind, value)*].
struct PackedCredential {
    FieldElement issuer_id;
    FieldElement holder_id;
    std::vector<EncodedClaim> claims;

    FieldVector pack() const;
    /// nullopt if the layout is malformed.
    static std::optional<PackedCredential> unpack(std::span<const FieldElement> packed);
    const EncodedClaim* find(const FieldElement& key_digest) const;
};

/// H1 over the packed credential under the credential site.
FieldElement credential_digest(const Deployment& d, const PackedCredential& packed);

struct Credential {
    FieldElement issuer_id;
    FieldElement holder_id;
    std::vector<Claim> claims; // ordered by key digest
    Signature signature;
    FieldElement u_rv; // revocation opening, held by the holder

    PackedCredential packed() const;
    FieldElement digest(const Deployment& d) const { return credential_digest(d, packed()); }
    const Claim* find(const std::string& key) const;
};

/// Sorts claims canonically; throws InvalidInput on empty or duplicate keys.
std::vector<Claim> canonical_claims(std::vector<Claim> claims);

// Text form: JSON object with keys in stable order, field elements as hex.
std::string credential_to_text(const Deployment& d, const Credential& cred);
Credential credential_from_text(const Deployment& d, const EnumRegistry& enums, const std::string& text);

} // namespace sybilid
