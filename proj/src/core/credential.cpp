#include "sybilid/credential.hpp"

#include "sybilid/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <set>

namespace sybilid {

using nlohmann::json;

std::string_view to_string(ClaimKind kind) noexcept {
    switch (kind) {
    case ClaimKind::Int: return "int";
    case ClaimKind::Enum: return "enum";
    case ClaimKind::String: return "str";
    }
    return "unknown";
}

ClaimKind parse_claim_kind(std::string_view name) {
    if (name == "int") return ClaimKind::Int;
    if (name == "enum") return ClaimKind::Enum;
    if (name == "str" || name == "string") return ClaimKind::String;
    fail(ErrorCode::InvalidInput, "unknown claim kind '" + std::string(name) + "'");
}

EnumRegistry EnumRegistry::with_builtins() {
    EnumRegistry r;
    r.add("blood", {"O", "A", "B", "AB"});
    r.add("grade", {"A", "B", "C", "D", "E", "F"});
    return r;
}

void EnumRegistry::add(const std::string& table, const std::vector<std::string>& labels) {
    if (tables_.count(table)) fail(ErrorCode::Conflict, "enum table '" + table + "' already registered");
    std::set<std::string> seen(labels.begin(), labels.end());
    if (seen.size() != labels.size() || labels.empty()) fail(ErrorCode::InvalidInput, "enum labels must be unique and nonempty");
    tables_[table] = labels;
}

std::uint64_t EnumRegistry::code(const std::string& table, const std::string& label) const {
    auto it = tables_.find(table);
    if (it == tables_.end()) fail(ErrorCode::EncodingError, "unknown enum table '" + table + "'");
    auto pos = std::find(it->second.begin(), it->second.end(), label);
    if (pos == it->second.end()) fail(ErrorCode::EncodingError, "'" + label + "' is not a code of enum '" + table + "'");
    return static_cast<std::uint64_t>(pos - it->second.begin()) + 1;
}

std::optional<std::string> EnumRegistry::label(const std::string& table, std::uint64_t code) const {
    auto it = tables_.find(table);
    if (it == tables_.end() || code == 0 || code > it->second.size()) return std::nullopt;
    return it->second[code - 1];
}

FieldElement encode_claim_value(const Deployment& d, const EnumRegistry& enums, const ClaimValue& value) {
    switch (value.kind) {
    case ClaimKind::Int:
        if (value.integer >= kMaxClaimMagnitude || value.integer <= -kMaxClaimMagnitude) {
            fail(ErrorCode::EncodingError, "integer claim outside (-2^62, 2^62)");
        }
        return d.field().from_i64(value.integer);
    case ClaimKind::Enum:
        return d.field().from_u64(enums.code(value.table, value.text));
    case ClaimKind::String:
        if (value.text.size() > kMaxClaimString) fail(ErrorCode::EncodingError, "string claim longer than 31 bytes");
        return d.hasher().hash_bytes(value.text, Site::StringValue);
    }
    fail(ErrorCode::EncodingError, "unknown claim kind");
}

FieldElement claim_key_digest(const Deployment& d, const std::string& key) {
    return d.hasher().hash_bytes(key, Site::ClaimKey);
}

Claim make_claim(const Deployment& d, const EnumRegistry& enums, const std::string& key, const ClaimValue& value) {
    if (key.empty()) fail(ErrorCode::InvalidInput, "claim key must be nonempty");
    return Claim{key, value, claim_key_digest(d, key), d.field().from_u64(static_cast<std::uint64_t>(value.kind)),
                 encode_claim_value(d, enums, value)};
}

FieldVector PackedCredential::pack() const {
    FieldVector out{issuer_id, holder_id};
    for (const auto& c : claims) {
        out.push_back(c.key_digest);
        out.push_back(c.kind);
        out.push_back(c.value);
    }
    return out;
}

std::optional<PackedCredential> PackedCredential::unpack(std::span<const FieldElement> packed) {
    if (packed.size() < 2 || (packed.size() - 2) % 3 != 0) return std::nullopt;
    PackedCredential pc{packed[0], packed[1], {}};
    for (std::size_t i = 2; i < packed.size(); i += 3) {
        pc.claims.push_back(EncodedClaim{packed[i], packed[i + 1], packed[i + 2]});
    }
    return pc;
}

const EncodedClaim* PackedCredential::find(const FieldElement& key_digest) const {
    for (const auto& c : claims) {
        if (c.key_digest == key_digest) return &c;
    }
    return nullptr;
}

FieldElement credential_digest(const Deployment& d, const PackedCredential& packed) {
    return d.hasher().h1(packed.pack(), Site::Credential);
}

PackedCredential Credential::packed() const {
    PackedCredential pc{issuer_id, holder_id, {}};
    for (const auto& c : claims) {
        pc.claims.push_back(EncodedClaim{c.key_digest, c.kind_code, c.encoded});
    }
    return pc;
}

const Claim* Credential::find(const std::string& key) const {
    for (const auto& c : claims) {
        if (c.key == key) return &c;
    }
    return nullptr;
}

std::vector<Claim> canonical_claims(std::vector<Claim> claims) {
    std::sort(claims.begin(), claims.end(), [](const Claim& a, const Claim& b) { return a.key_digest < b.key_digest; });
    for (std::size_t i = 0; i < claims.size(); ++i) {
        if (claims[i].key.empty()) fail(ErrorCode::InvalidInput, "claim key must be nonempty");
        if (i > 0 && claims[i].key_digest == claims[i - 1].key_digest) {
            fail(ErrorCode::InvalidInput, "duplicate claim key '" + claims[i].key + "'");
        }
    }
    return claims;
}

std::string credential_to_text(const Deployment& d, const Credential& cred) {
    const auto& f = d.field();
    json claims = json::array();
    for (const auto& c : cred.claims) {
        json jc;
        jc["key"] = c.key;
        switch (c.value.kind) {
        case ClaimKind::Int:
            jc["kind"] = "int";
            jc["value"] = c.value.integer;
            break;
        case ClaimKind::Enum:
            jc["kind"] = "enum:" + c.value.table;
            jc["value"] = c.value.text;
            break;
        case ClaimKind::String:
            jc["kind"] = "str";
            jc["value"] = c.value.text;
            break;
        }
        claims.push_back(jc);
    }
    json j;
    j["issuer_id"] = f.to_hex(cred.issuer_id);
    j["holder_id"] = f.to_hex(cred.holder_id);
    j["claims"] = claims;
    j["signature"] = encode_signature(d, cred.signature);
    j["u_rv"] = f.to_hex(cred.u_rv);
    return j.dump(2);
}

Credential credential_from_text(const Deployment& d, const EnumRegistry& enums, const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail(ErrorCode::InvalidInput, std::string("credential is not valid JSON: ") + e.what());
    }
    try {
        const auto& f = d.field();
        Credential cred;
        cred.issuer_id = f.from_hex(j.at("issuer_id").get<std::string>());
        cred.holder_id = f.from_hex(j.at("holder_id").get<std::string>());
        cred.signature = decode_signature(d, j.at("signature").get<std::string>());
        cred.u_rv = f.from_hex(j.at("u_rv").get<std::string>());
        std::vector<Claim> claims;
        for (const auto& jc : j.at("claims")) {
            ClaimValue v;
            std::string kind = jc.at("kind").get<std::string>();
            if (kind.rfind("enum:", 0) == 0) {
                v.kind = ClaimKind::Enum;
                v.table = kind.substr(5);
                v.text = jc.at("value").get<std::string>();
            } else {
                v.kind = parse_claim_kind(kind);
                if (v.kind == ClaimKind::Int) {
                    v.integer = jc.at("value").get<std::int64_t>();
                } else {
                    v.text = jc.at("value").get<std::string>();
                }
            }
            claims.push_back(make_claim(d, enums, jc.at("key").get<std::string>(), v));
        }
        cred.claims = canonical_claims(std::move(claims));
        return cred;
    } catch (const json::exception& e) {
        fail(ErrorCode::InvalidInput, std::string("malformed credential: ") + e.what());
    }
}

} // namespace sybilid
