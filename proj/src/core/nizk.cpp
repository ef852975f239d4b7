#include "sybilid/nizk.hpp"

#include "sybilid/errors.hpp"
#include "sybilid/relations.hpp"

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <sstream>

namespace sybilid {

using nlohmann::json;

namespace {

const FieldVector kEmpty;

std::size_t path_width(const Deployment& d) {
    return static_cast<std::size_t>(d.protocol().tree_depth) + 1;
}

// Empty string when the slots conform, otherwise a description of the first violation.
std::string schema_violation(const Deployment& d, const std::vector<SlotSpec>& specs, const SlotMap& slots) {
    for (const auto& [name, values] : slots) {
        bool known = false;
        for (const auto& s : specs) known |= s.name == name;
        if (!known) return "unexpected slot '" + name + "'";
    }
    for (const auto& s : specs) {
        auto it = slots.find(s.name);
        std::size_t n = it == slots.end() ? 0 : it->second.size();
        if (s.paths) {
            if (n % path_width(d) != 0) return "slot '" + s.name + "' is not a whole number of paths";
            n /= path_width(d);
        }
        if (n < s.min || n > s.max) return "slot '" + s.name + "' has arity " + std::to_string(n);
    }
    return {};
}

bool run_clause(const Clause& c, const ClauseContext& ctx) {
    try {
        return c.holds(ctx);
    } catch (const std::exception&) {
        return false;
    }
}

std::string encode_payload(const Deployment& d, const FieldElement& digest, const SlotMap& witness) {
    const auto& f = d.field();
    std::ostringstream out;
    out << "v1\n" << f.to_hex(digest) << '\n';
    for (const auto& [name, values] : witness) {
        out << name << '=';
        for (std::size_t i = 0; i < values.size(); ++i) out << (i ? "," : "") << f.to_hex(values[i]);
        out << '\n';
    }
    out << "end\n";
    return base64_encode(out.str());
}

struct DecodedPayload {
    FieldElement digest;
    SlotMap witness;
};

std::optional<DecodedPayload> decode_payload(const Deployment& d, const std::string& payload) {
    try {
        std::string raw = base64_decode(payload);
        if (raw.size() < 4 || raw.compare(raw.size() - 4, 4, "end\n") != 0) return std::nullopt;
        std::istringstream in(raw);
        std::string line;
        if (!std::getline(in, line) || line != "v1") return std::nullopt;
        if (!std::getline(in, line)) return std::nullopt;
        DecodedPayload out{d.field().from_hex(line), {}};
        bool ended = false;
        while (std::getline(in, line)) {
            if (line == "end") {
                ended = true;
                break;
            }
            auto eq = line.find('=');
            if (eq == std::string::npos || eq == 0) return std::nullopt;
            std::string name = line.substr(0, eq);
            if (out.witness.count(name)) return std::nullopt;
            FieldVector values;
            std::string rest = line.substr(eq + 1);
            std::size_t pos = 0;
            while (pos < rest.size()) {
                auto comma = rest.find(',', pos);
                if (comma == std::string::npos) comma = rest.size();
                values.push_back(d.field().from_hex(std::string_view(rest).substr(pos, comma - pos)));
                pos = comma + 1;
            }
            out.witness[name] = std::move(values);
        }
        std::string trailing;
        if (!ended || std::getline(in, trailing)) return std::nullopt;
        return out;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

} // namespace

const FieldVector& ClauseContext::get(const std::string& name) const {
    for (const SlotMap* m : {&statement_, &witness_, &verifier_}) {
        auto it = m->find(name);
        if (it != m->end()) return it->second;
    }
    return kEmpty;
}

const FieldElement& ClauseContext::one(const std::string& name) const {
    const auto& v = get(name);
    if (v.size() != 1) fail(ErrorCode::SchemaError, "slot '" + name + "' must hold one element");
    return v.front();
}

const RelationRegistry& RelationRegistry::standard() {
    static const RelationRegistry registry = [] {
        RelationRegistry r;
        register_protocol_relations(r);
        return r;
    }();
    return registry;
}

void RelationRegistry::add(RelationDescriptor relation) {
    if (relations_.count(relation.label)) fail(ErrorCode::Conflict, "relation '" + relation.label + "' already registered");
    std::string label = relation.label;
    relations_.emplace(std::move(label), std::move(relation));
}

const RelationDescriptor* RelationRegistry::find(const std::string& label) const {
    auto it = relations_.find(label);
    return it == relations_.end() ? nullptr : &it->second;
}

std::vector<std::string> RelationRegistry::labels() const {
    std::vector<std::string> out;
    for (const auto& [label, rel] : relations_) out.push_back(label);
    return out;
}

Nizk::Nizk(DeploymentPtr deployment, const RelationRegistry& registry)
    : d_(std::move(deployment)), registry_(&registry) {
    if (!d_) fail(ErrorCode::InvalidInput, "null deployment");
}

const RelationDescriptor& Nizk::lookup(const std::string& relation) const {
    const auto* r = registry_->find(relation);
    if (!r) fail(ErrorCode::UnknownRelation, "no relation '" + relation + "'");
    return *r;
}

ReferenceString Nizk::setup(const std::string& relation) const {
    return ReferenceString{lookup(relation).label, 1};
}

FieldElement Nizk::statement_digest(const std::string& relation, const SlotMap& statement) const {
    const auto& h = d_->hasher();
    FieldVector in{h.hash_bytes(relation, Site::Statement)};
    for (const auto& [name, values] : statement) {
        in.push_back(h.hash_bytes(name, Site::Statement));
        in.push_back(d_->field().from_u64(values.size()));
        in.insert(in.end(), values.begin(), values.end());
    }
    return h.h1(in, Site::Statement);
}

Proof Nizk::prove(const ReferenceString& crs, const SlotMap& statement, const SlotMap& witness) const {
    const auto& rel = lookup(crs.relation);
    for (const auto& s : rel.verifier) {
        if (witness.count(s.name)) fail(ErrorCode::SchemaError, "verifier slot '" + s.name + "' supplied by prover");
    }
    if (auto v = schema_violation(*d_, rel.statement, statement); !v.empty()) fail(ErrorCode::SchemaError, "statement: " + v);
    if (auto v = schema_violation(*d_, rel.witness, witness); !v.empty()) fail(ErrorCode::SchemaError, "witness: " + v);
    SlotMap none;
    ClauseContext ctx(*d_, statement, witness, none);
    for (const auto& c : rel.clauses) {
        if (c.needs_verifier_witness) continue;
        if (!run_clause(c, ctx)) fail(ErrorCode::UnsatisfiedRelation, rel.label + " clause '" + c.name + "' does not hold");
    }
    Proof p;
    p.relation = rel.label;
    p.statement = statement;
    p.payload = encode_payload(*d_, statement_digest(rel.label, statement), witness);
    return p;
}

bool Nizk::verify(const ReferenceString& crs, const SlotMap& statement, const Proof& proof,
                  const SlotMap& verifier_witness) const {
    if (crs.relation != proof.relation) {
        fail(ErrorCode::RelationMismatch, "reference string for '" + crs.relation + "' used with a '" + proof.relation + "' proof");
    }
    const auto& rel = lookup(crs.relation);
    if (proof.backend != "direct-check" || crs.version != 1) return false;
    if (!schema_violation(*d_, rel.statement, statement).empty()) return false;
    if (!schema_violation(*d_, rel.verifier, verifier_witness).empty()) return false;
    auto decoded = decode_payload(*d_, proof.payload);
    if (!decoded || decoded->digest != statement_digest(rel.label, statement)) return false;
    if (!schema_violation(*d_, rel.witness, decoded->witness).empty()) return false;
    ClauseContext ctx(*d_, statement, decoded->witness, verifier_witness);
    for (const auto& c : rel.clauses) {
        if (!run_clause(c, ctx)) return false;
    }
    return true;
}

ClauseReport Nizk::check(const std::string& relation, const SlotMap& statement, const SlotMap& witness,
                         const SlotMap& verifier_witness, bool include_verifier) const {
    const auto& rel = lookup(relation);
    if (!schema_violation(*d_, rel.statement, statement).empty() || !schema_violation(*d_, rel.witness, witness).empty() ||
        !schema_violation(*d_, rel.verifier, verifier_witness).empty()) {
        return {false, "schema"};
    }
    ClauseContext ctx(*d_, statement, witness, verifier_witness);
    for (const auto& c : rel.clauses) {
        if (c.needs_verifier_witness && !include_verifier) continue;
        if (!run_clause(c, ctx)) return {false, c.name};
    }
    return {};
}

const FieldVector& statement_slot(const Proof& proof, const std::string& name) {
    auto it = proof.statement.find(name);
    if (it == proof.statement.end()) fail(ErrorCode::SchemaError, "proof has no slot '" + name + "'");
    return it->second;
}

const FieldElement& statement_one(const Proof& proof, const std::string& name) {
    const auto& v = statement_slot(proof, name);
    if (v.size() != 1) fail(ErrorCode::SchemaError, "slot '" + name + "' must hold one element");
    return v.front();
}

std::string proof_to_json(const Deployment& d, const Proof& proof) {
    json stmt = json::object();
    for (const auto& [name, values] : proof.statement) {
        json arr = json::array();
        for (const auto& v : values) arr.push_back(d.field().to_hex(v));
        stmt[name] = arr;
    }
    json j;
    j["version"] = 1;
    j["relation"] = proof.relation;
    j["backend"] = proof.backend;
    j["statement"] = stmt;
    j["payload"] = proof.payload;
    return j.dump();
}

Proof proof_from_json(const Deployment& d, const std::string& text) {
    try {
        json j = json::parse(text);
        if (j.at("version").get<int>() != 1) fail(ErrorCode::EncodingError, "unsupported proof version");
        Proof p;
        p.relation = j.at("relation").get<std::string>();
        p.backend = j.at("backend").get<std::string>();
        p.payload = j.at("payload").get<std::string>();
        for (const auto& [name, arr] : j.at("statement").items()) {
            FieldVector values;
            for (const auto& v : arr) values.push_back(d.field().from_hex(v.get<std::string>()));
            p.statement[name] = std::move(values);
        }
        return p;
    } catch (const json::exception& e) {
        fail(ErrorCode::EncodingError, std::string("malformed proof: ") + e.what());
    } catch (const ProtocolError& e) {
        if (e.code() == ErrorCode::EncodingError) throw;
        fail(ErrorCode::EncodingError, std::string("malformed proof: ") + e.what());
    }
}

std::string base64_encode(std::string_view bytes) {
    std::string out(4 * ((bytes.size() + 2) / 3), '\0');
    int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                            reinterpret_cast<const unsigned char*>(bytes.data()), static_cast<int>(bytes.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

std::string base64_decode(std::string_view text) {
    if (text.size() % 4 != 0) fail(ErrorCode::EncodingError, "base64 length is not a multiple of 4");
    std::string out(3 * (text.size() / 4), '\0');
    int n = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                            reinterpret_cast<const unsigned char*>(text.data()), static_cast<int>(text.size()));
    if (n < 0) fail(ErrorCode::EncodingError, "invalid base64");
    std::size_t pad = 0;
    if (!text.empty() && text.back() == '=') ++pad;
    if (text.size() > 1 && text[text.size() - 2] == '=') ++pad;
    out.resize(static_cast<std::size_t>(n) - pad);
    return out;
}

FieldVector encode_path(const Deployment& d, const MerkleProof& proof) {
    FieldVector out{d.field().from_u64(proof.index)};
    out.insert(out.end(), proof.siblings.begin(), proof.siblings.end());
    return out;
}

std::optional<MerkleProof> decode_path(const Deployment& d, std::span<const FieldElement> packed) {
    if (packed.size() != path_width(d)) return std::nullopt;
    std::int64_t index = 0;
    if (!d.field().to_i64(packed[0], index) || index < 0) return std::nullopt;
    MerkleProof p;
    p.index = static_cast<std::uint64_t>(index);
    p.siblings.assign(packed.begin() + 1, packed.end());
    return p;
}

} // namespace sybilid
