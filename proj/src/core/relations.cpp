#include "sybilid/relations.hpp"

#include "sybilid/credential.hpp"
#include "sybilid/errors.hpp"
#include "sybilid/predicate.hpp"

#include <algorithm>

namespace sybilid {

FieldElement identity_leaf(const Deployment& d, const FieldElement& id, const PublicKey& pk) {
    auto pkf = d.group().to_fields(pk);
    return d.hasher().h1({id, pkf[0], pkf[1]}, Site::Identity);
}

FieldElement registration_leaf(const Deployment& d, const FieldElement& id, const FieldElement& sk) {
    return d.hasher().h1({id, sk}, Site::Registration);
}

FieldElement registration_nullifier(const Deployment& d, const FieldElement& id, const FieldElement& sk) {
    return d.hasher().h1({id, sk, d.field().one()}, Site::Registration);
}

FieldElement association_id(const Deployment& d, std::span<const FieldElement> ids, const std::optional<FieldElement>& u_a) {
    FieldVector in(ids.begin(), ids.end());
    if (u_a) in.push_back(*u_a);
    return d.hasher().h1(in, Site::Association);
}

FieldElement association_nullifier(const Deployment& d, std::span<const FieldElement> ids,
                                   const std::optional<FieldElement>& u_a) {
    FieldVector in(ids.begin(), ids.end());
    if (u_a) in.push_back(*u_a);
    in.push_back(d.field().one());
    return d.hasher().h1(in, Site::Association);
}

FieldElement campaign_association_nullifier(const Deployment& d, std::span<const FieldElement> ids,
                                            const FieldElement& campaign) {
    FieldVector in(ids.begin(), ids.end());
    in.push_back(campaign);
    return d.hasher().h1(in, Site::CampaignAssoc);
}

FieldElement campaign_credential_nullifier(const Deployment& d, const FieldElement& digest, const FieldElement& sk,
                                           const FieldElement& campaign) {
    return d.hasher().h1({digest, sk, campaign}, Site::CampaignCred);
}

FieldElement revocation_leaf(const Deployment& d, const FieldElement& digest, const FieldElement& u_rv) {
    return d.hasher().h1({digest, u_rv}, Site::Revocation);
}

FieldElement revocation_nullifier(const Deployment& d, const FieldElement& digest, const FieldElement& u_rv) {
    return d.hasher().h1({digest, u_rv, d.field().one()}, Site::Revocation);
}

namespace {

using Ctx = ClauseContext;

std::size_t path_width(const Deployment& d) {
    return static_cast<std::size_t>(d.protocol().tree_depth) + 1;
}

std::optional<PackedCredential> cred_of(const Ctx& c) {
    return PackedCredential::unpack(c.get("cred"));
}

FieldElement digest_of(const Ctx& c) {
    auto pc = cred_of(c);
    if (!pc) fail(ErrorCode::SchemaError, "malformed credential witness");
    return credential_digest(c.deployment(), *pc);
}

std::optional<PublicKey> key_from(const Deployment& d, std::span<const FieldElement> v) {
    if (v.size() != 2) return std::nullopt;
    PublicKey pk = d.group().from_fields(v[0], v[1]);
    if (!d.group().is_member(pk)) return std::nullopt;
    return pk;
}

bool key_matches(const Deployment& d, const FieldElement& sk, std::span<const FieldElement> pk) {
    if (sk.is_zero() || pk.size() != 2) return false;
    auto expected = d.group().to_fields(pubkey_of(d, sk));
    return expected[0] == pk[0] && expected[1] == pk[1];
}

// The i-th path packed in a slot.
std::span<const FieldElement> path_at(const Ctx& c, const std::string& slot, std::size_t i) {
    const auto& v = c.get(slot);
    std::size_t w = path_width(c.deployment());
    if ((i + 1) * w > v.size()) fail(ErrorCode::SchemaError, "missing path");
    return std::span<const FieldElement>(v).subspan(i * w, w);
}

std::size_t path_count(const Ctx& c, const std::string& slot) {
    return c.get(slot).size() / path_width(c.deployment());
}

bool member(const Ctx& c, const FieldElement& root, const FieldElement& leaf, std::span<const FieldElement> packed) {
    const auto& d = c.deployment();
    auto proof = decode_path(d, packed);
    return proof && verify_membership(d.hasher(), d.protocol().tree_depth, root, leaf, *proof);
}

bool member(const Ctx& c, const std::string& root_slot, const FieldElement& leaf, const std::string& path_slot) {
    return member(c, c.one(root_slot), leaf, path_at(c, path_slot, 0));
}

std::optional<FieldElement> optional_one(const Ctx& c, const std::string& slot) {
    const auto& v = c.get(slot);
    if (v.empty()) return std::nullopt;
    return c.one(slot);
}

// Holder randomness slots must be present exactly when the deployment randomizes id_a.
bool randomness_matches_mode(const Ctx& c, const std::string& slot) {
    return c.get(slot).size() == (c.deployment().protocol().randomized_association ? 1U : 0U);
}

bool contains(const FieldVector& v, const FieldElement& x) {
    return std::find(v.begin(), v.end(), x) != v.end();
}

bool distinct(FieldVector v) {
    std::sort(v.begin(), v.end());
    return std::adjacent_find(v.begin(), v.end()) == v.end();
}

std::uint64_t small(const Deployment& d, const FieldElement& x) {
    std::int64_t v = 0;
    if (!d.field().to_i64(x, v) || v < 0) return ~std::uint64_t{0};
    return static_cast<std::uint64_t>(v);
}

Clause prover(std::string name, std::function<bool(const Ctx&)> fn) {
    return Clause{std::move(name), false, std::move(fn)};
}

Clause verifier_only(std::string name, std::function<bool(const Ctx&)> fn) {
    return Clause{std::move(name), true, std::move(fn)};
}

Clause commitment_opens() {
    return prover("commitment-opens", [](const Ctx& c) {
        return commit(c.deployment(), digest_of(c), c.one("u_c")) == Commitment{c.one("c_c")};
    });
}

// Membership of an association (id_a over ids and optional randomness) and its nullifier.
Clause association_live(const std::string& root, const std::string& path, const std::string& ids,
                        const std::string& u_a, const std::string& n_a) {
    return prover("association-live", [=](const Ctx& c) {
        const auto& d = c.deployment();
        const auto& members = c.get(ids);
        if (members.empty() || !randomness_matches_mode(c, u_a)) return false;
        auto u = optional_one(c, u_a);
        return member(c, root, association_id(d, members, u), path) &&
               c.one(n_a) == association_nullifier(d, members, u);
    });
}

RelationDescriptor selective_disclosure() {
    RelationDescriptor r;
    r.label = rel::SelectiveDisclosure;
    r.statement = {{"c_c"}, {"id_I"}, {"pk_I", 2, 2}, {"sig_mode"}, {"sig", 1, 2}, {"phi", 3, kUnbounded},
                   {"guard"}, {"guard_value", 1, 2}, {"r_id"}, {"c_id"}, {"u_id"}};
    r.witness = {{"cred", 2, kUnbounded}, {"u_c"}, {"sk_H"}, {"pk_H", 2, 2}, {"rho_id", 1, 1, true},
                 {"sig_hidden", 0, 2}, {"u_sig", 0, 1}};
    r.verifier = {{"sk_V", 0, 1}};
    r.clauses = {
        prover("modes-well-formed", [](const Ctx& c) {
            const auto& d = c.deployment();
            auto mode = small(d, c.one("sig_mode"));
            auto guard = small(d, c.one("guard"));
            bool sig_ok = (mode == kSignaturePublic && c.get("sig").size() == 2 && c.get("sig_hidden").empty() &&
                           c.get("u_sig").empty()) ||
                          (mode == kSignatureMasked && c.get("sig").size() == 1 && c.get("sig_hidden").size() == 2 &&
                           c.get("u_sig").size() == 1);
            bool guard_ok = (guard == static_cast<std::uint64_t>(ForwardingGuard::VerifierKey) && c.get("guard_value").size() == 2) ||
                            (guard == static_cast<std::uint64_t>(ForwardingGuard::Challenge) && c.get("guard_value").size() == 1);
            return sig_ok && guard_ok;
        }),
        commitment_opens(),
        prover("issuer-matches", [](const Ctx& c) {
            auto pc = cred_of(c);
            return pc && pc->issuer_id == c.one("id_I");
        }),
        prover("signature-valid", [](const Ctx& c) {
            const auto& d = c.deployment();
            auto pk = key_from(d, c.get("pk_I"));
            if (!pk) return false;
            FieldElement digest = digest_of(c);
            if (small(d, c.one("sig_mode")) == kSignaturePublic) {
                const auto& s = c.get("sig");
                return verify_sign(d, *pk, Signature{s.at(0), s.at(1)}, digest);
            }
            const auto& h = c.get("sig_hidden");
            Signature hidden{h.at(0), h.at(1)};
            return commit(d, signature_digest(d, hidden), c.one("u_sig")) == Commitment{c.one("sig")} &&
                   verify_sign(d, *pk, hidden, digest);
        }),
        prover("claim-present", [](const Ctx& c) {
            auto pc = cred_of(c);
            return pc && pc->find(c.get("phi").front()) != nullptr;
        }),
        prover("predicate-holds", [](const Ctx& c) {
            auto pc = cred_of(c);
            if (!pc) return false;
            const auto* claim = pc->find(c.get("phi").front());
            return claim && evaluate_predicate(c.deployment(), c.get("phi"), *claim);
        }),
        prover("holder-key", [](const Ctx& c) { return key_matches(c.deployment(), c.one("sk_H"), c.get("pk_H")); }),
        prover("holder-registered", [](const Ctx& c) {
            const auto& d = c.deployment();
            auto pc = cred_of(c);
            auto pk = key_from(d, c.get("pk_H"));
            return pc && pk && member(c, "r_id", identity_leaf(d, pc->holder_id, *pk), "rho_id");
        }),
        prover("identifier-commitment", [](const Ctx& c) {
            auto pc = cred_of(c);
            return pc && commit(c.deployment(), pc->holder_id, c.one("u_id")) == Commitment{c.one("c_id")};
        }),
        verifier_only("forwarding-guard", [](const Ctx& c) {
            const auto& d = c.deployment();
            if (small(d, c.one("guard")) != static_cast<std::uint64_t>(ForwardingGuard::VerifierKey)) {
                return c.get("sk_V").empty();
            }
            return c.get("sk_V").size() == 1 && key_matches(d, c.one("sk_V"), c.get("guard_value"));
        }),
    };
    return r;
}

RelationDescriptor holder_id() {
    RelationDescriptor r;
    r.label = rel::HolderId;
    r.statement = {{"c_c"}};
    r.witness = {{"cred", 2, kUnbounded}, {"u_c"}, {"sk_H"}, {"pk_H", 2, 2}};
    r.clauses = {
        commitment_opens(),
        prover("holder-key", [](const Ctx& c) { return key_matches(c.deployment(), c.one("sk_H"), c.get("pk_H")); }),
    };
    return r;
}

RelationDescriptor vdr_membership() {
    RelationDescriptor r;
    r.label = rel::VdrMembership;
    r.statement = {{"r_id"}, {"c_id"}, {"u_id"}};
    r.witness = {{"v_id"}, {"rho_id", 1, 1, true}, {"id_H"}, {"pk_H", 2, 2}};
    r.clauses = {
        prover("leaf-preimage", [](const Ctx& c) {
            const auto& d = c.deployment();
            auto pk = key_from(d, c.get("pk_H"));
            return pk && identity_leaf(d, c.one("id_H"), *pk) == c.one("v_id");
        }),
        prover("leaf-member", [](const Ctx& c) { return member(c, "r_id", c.one("v_id"), "rho_id"); }),
        prover("identifier-commitment", [](const Ctx& c) {
            return commit(c.deployment(), c.one("id_H"), c.one("u_id")) == Commitment{c.one("c_id")};
        }),
    };
    return r;
}

RelationDescriptor verifier_key() {
    RelationDescriptor r;
    r.label = rel::VerifierKey;
    r.statement = {{"pk_V", 2, 2}};
    r.verifier = {{"sk_V"}};
    r.clauses = {
        verifier_only("verifier-key", [](const Ctx& c) { return key_matches(c.deployment(), c.one("sk_V"), c.get("pk_V")); }),
    };
    return r;
}

RelationDescriptor cred_validity() {
    RelationDescriptor r;
    r.label = rel::CredValidity;
    r.statement = {{"c_c"}, {"r_rv"}, {"n_rv"}};
    r.witness = {{"cred", 2, kUnbounded}, {"u_c"}, {"rho_rv", 1, 1, true}, {"u_rv"}};
    r.clauses = {
        commitment_opens(),
        prover("revocation-member", [](const Ctx& c) {
            return member(c, "r_rv", revocation_leaf(c.deployment(), digest_of(c), c.one("u_rv")), "rho_rv");
        }),
        prover("revocation-nullifier", [](const Ctx& c) {
            return c.one("n_rv") == revocation_nullifier(c.deployment(), digest_of(c), c.one("u_rv"));
        }),
    };
    return r;
}

RelationDescriptor campaign_nullifier() {
    RelationDescriptor r;
    r.label = rel::CampaignNullifier;
    r.statement = {{"id_V"}, {"id_eps"}, {"n_s"}, {"c_c"}, {"r_id"}};
    r.witness = {{"cred", 2, kUnbounded}, {"u_c"}, {"sk_H"}, {"pk_H", 2, 2}, {"rho_id", 1, 1, true}};
    r.clauses = {
        commitment_opens(),
        prover("issuer-is-verifier", [](const Ctx& c) {
            auto pc = cred_of(c);
            return pc && pc->issuer_id == c.one("id_V");
        }),
        prover("holder-key", [](const Ctx& c) { return key_matches(c.deployment(), c.one("sk_H"), c.get("pk_H")); }),
        prover("holder-registered", [](const Ctx& c) {
            const auto& d = c.deployment();
            auto pc = cred_of(c);
            auto pk = key_from(d, c.get("pk_H"));
            return pc && pk && member(c, "r_id", identity_leaf(d, pc->holder_id, *pk), "rho_id");
        }),
        prover("campaign-nullifier", [](const Ctx& c) {
            return c.one("n_s") == campaign_credential_nullifier(c.deployment(), digest_of(c), c.one("sk_H"), c.one("id_eps"));
        }),
    };
    return r;
}

RelationDescriptor id_register() {
    RelationDescriptor r;
    r.label = rel::IdRegister;
    r.statement = {{"r_id"}, {"h_id"}};
    r.witness = {{"id"}, {"sk"}, {"rho_id", 1, 1, true}};
    r.clauses = {
        prover("identity-member", [](const Ctx& c) {
            const auto& d = c.deployment();
            if (c.one("sk").is_zero()) return false;
            return member(c, "r_id", identity_leaf(d, c.one("id"), pubkey_of(d, c.one("sk"))), "rho_id");
        }),
        prover("registration-leaf", [](const Ctx& c) {
            return c.one("h_id") == registration_leaf(c.deployment(), c.one("id"), c.one("sk"));
        }),
    };
    return r;
}

RelationDescriptor id_associate() {
    RelationDescriptor r;
    r.label = rel::IdAssociate;
    r.statement = {{"r_reg"}, {"id_a"}, {"n_reg", 1, kUnbounded}};
    r.witness = {{"ids", 1, kUnbounded}, {"sks", 1, kUnbounded}, {"rho_reg", 1, kUnbounded, true}, {"u_a", 0, 1}};
    r.clauses = {
        prover("arity", [](const Ctx& c) {
            std::size_t n = c.get("ids").size();
            return c.get("sks").size() == n && c.get("n_reg").size() == n && path_count(c, "rho_reg") == n &&
                   randomness_matches_mode(c, "u_a") && distinct(c.get("ids"));
        }),
        prover("registered", [](const Ctx& c) {
            const auto& ids = c.get("ids");
            const auto& sks = c.get("sks");
            for (std::size_t i = 0; i < ids.size(); ++i) {
                auto leaf = registration_leaf(c.deployment(), ids[i], sks.at(i));
                if (!member(c, c.one("r_reg"), leaf, path_at(c, "rho_reg", i))) return false;
            }
            return true;
        }),
        prover("registration-nullifiers", [](const Ctx& c) {
            const auto& ids = c.get("ids");
            for (std::size_t i = 0; i < ids.size(); ++i) {
                if (c.get("n_reg").at(i) != registration_nullifier(c.deployment(), ids[i], c.get("sks").at(i))) return false;
            }
            return true;
        }),
        prover("association-id", [](const Ctx& c) {
            return c.one("id_a") == association_id(c.deployment(), c.get("ids"), optional_one(c, "u_a"));
        }),
    };
    return r;
}

RelationDescriptor id_present() {
    RelationDescriptor r;
    r.label = rel::IdPresent;
    r.statement = {{"r_a"}, {"id_H"}, {"id_eps"}, {"n_a_eps"}, {"n_a"}};
    r.witness = {{"ids", 1, kUnbounded}, {"rho_a", 1, 1, true}, {"u_a", 0, 1}};
    r.clauses = {
        association_live("r_a", "rho_a", "ids", "u_a", "n_a"),
        prover("identifier-included", [](const Ctx& c) { return contains(c.get("ids"), c.one("id_H")); }),
        prover("campaign-nullifier", [](const Ctx& c) {
            return c.one("n_a_eps") == campaign_association_nullifier(c.deployment(), c.get("ids"), c.one("id_eps"));
        }),
    };
    return r;
}

RelationDescriptor id_append() {
    RelationDescriptor r;
    r.label = rel::IdAppend;
    r.statement = {{"r_a"}, {"r_reg"}, {"n_a"}, {"id_a_new"}, {"n_reg_new"}};
    r.witness = {{"ids", 1, kUnbounded}, {"rho_a", 1, 1, true}, {"u_a", 0, 1}, {"id_new"}, {"sk_new"},
                 {"rho_reg", 1, 1, true}, {"u_a_new", 0, 1}};
    r.clauses = {
        association_live("r_a", "rho_a", "ids", "u_a", "n_a"),
        prover("new-registered", [](const Ctx& c) {
            return member(c, "r_reg", registration_leaf(c.deployment(), c.one("id_new"), c.one("sk_new")), "rho_reg");
        }),
        prover("new-registration-nullifier", [](const Ctx& c) {
            return c.one("n_reg_new") == registration_nullifier(c.deployment(), c.one("id_new"), c.one("sk_new"));
        }),
        prover("new-association-id", [](const Ctx& c) {
            if (!randomness_matches_mode(c, "u_a_new")) return false;
            FieldVector ids = c.get("ids");
            ids.push_back(c.one("id_new"));
            return c.one("id_a_new") == association_id(c.deployment(), ids, optional_one(c, "u_a_new"));
        }),
    };
    return r;
}

RelationDescriptor id_aggregate() {
    RelationDescriptor r;
    r.label = rel::IdAggregate;
    r.statement = {{"r_a"}, {"n_a1"}, {"n_a2"}, {"id_a_new"}};
    r.witness = {{"ids1", 1, kUnbounded}, {"rho_a1", 1, 1, true}, {"u_a1", 0, 1},
                 {"ids2", 1, kUnbounded}, {"rho_a2", 1, 1, true}, {"u_a2", 0, 1}, {"u_a_new", 0, 1}};
    r.clauses = {
        association_live("r_a", "rho_a1", "ids1", "u_a1", "n_a1"),
        association_live("r_a", "rho_a2", "ids2", "u_a2", "n_a2"),
        prover("new-association-id", [](const Ctx& c) {
            if (!randomness_matches_mode(c, "u_a_new")) return false;
            FieldVector ids = c.get("ids1");
            const auto& more = c.get("ids2");
            ids.insert(ids.end(), more.begin(), more.end());
            return c.one("id_a_new") == association_id(c.deployment(), ids, optional_one(c, "u_a_new"));
        }),
    };
    return r;
}

RelationDescriptor key_refresh(bool randomized) {
    RelationDescriptor r;
    r.label = randomized ? rel::KeyRefreshRand : rel::KeyRefresh;
    r.statement = {{"r_a"}, {"n_a"}, {"id_H"}, {"pk_new", 2, 2}, {"n_reg_new"}};
    r.witness = {{"ids", 1, kUnbounded}, {"rho_a", 1, 1, true}, {"sk_new"}};
    if (randomized) r.witness.push_back({"u_a"});
    r.clauses = {
        prover("association-live", [](const Ctx& c) {
            const auto& d = c.deployment();
            const auto& ids = c.get("ids");
            auto u = optional_one(c, "u_a");
            return member(c, "r_a", association_id(d, ids, u), "rho_a") &&
                   c.one("n_a") == association_nullifier(d, ids, u);
        }),
        prover("identifier-included", [](const Ctx& c) { return contains(c.get("ids"), c.one("id_H")); }),
        prover("new-key", [](const Ctx& c) { return key_matches(c.deployment(), c.one("sk_new"), c.get("pk_new")); }),
        prover("new-registration-nullifier", [](const Ctx& c) {
            return c.one("n_reg_new") == registration_nullifier(c.deployment(), c.one("id_H"), c.one("sk_new"));
        }),
    };
    return r;
}

RelationDescriptor nullifier_update() {
    RelationDescriptor r;
    r.label = rel::NullifierUpdate;
    r.statement = {{"r_rv"}, {"n_rv"}, {"h_rv_new"}};
    r.witness = {{"cred", 2, kUnbounded}, {"rho_rv", 1, 1, true}, {"u_rv"}, {"u_rv_new"}};
    r.clauses = {
        prover("revocation-member", [](const Ctx& c) {
            return member(c, "r_rv", revocation_leaf(c.deployment(), digest_of(c), c.one("u_rv")), "rho_rv");
        }),
        prover("revocation-nullifier", [](const Ctx& c) {
            return c.one("n_rv") == revocation_nullifier(c.deployment(), digest_of(c), c.one("u_rv"));
        }),
        prover("new-revocation-leaf", [](const Ctx& c) {
            return c.one("h_rv_new") == revocation_leaf(c.deployment(), digest_of(c), c.one("u_rv_new"));
        }),
    };
    return r;
}

RelationDescriptor assoc_rand_refresh() {
    RelationDescriptor r;
    r.label = rel::AssocRandRefresh;
    r.statement = {{"r_a"}, {"n_a"}, {"id_a_new"}};
    r.witness = {{"ids", 1, kUnbounded}, {"rho_a", 1, 1, true}, {"u_a"}, {"u_a_new"}};
    r.clauses = {
        prover("randomized-mode", [](const Ctx& c) { return c.deployment().protocol().randomized_association; }),
        association_live("r_a", "rho_a", "ids", "u_a", "n_a"),
        prover("same-members", [](const Ctx& c) {
            return c.one("id_a_new") == association_id(c.deployment(), c.get("ids"), c.one("u_a_new"));
        }),
    };
    return r;
}

} // namespace

void register_protocol_relations(RelationRegistry& registry) {
    registry.add(selective_disclosure());
    registry.add(holder_id());
    registry.add(vdr_membership());
    registry.add(verifier_key());
    registry.add(cred_validity());
    registry.add(campaign_nullifier());
    registry.add(id_register());
    registry.add(id_associate());
    registry.add(id_present());
    registry.add(id_append());
    registry.add(id_aggregate());
    registry.add(key_refresh(false));
    registry.add(key_refresh(true));
    registry.add(nullifier_update());
    registry.add(assoc_rand_refresh());
}

} // namespace sybilid
