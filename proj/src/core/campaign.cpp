#include "sybilid/campaign.hpp"

#include "sybilid/errors.hpp"
#include "sybilid/relations.hpp"
#include "state_digest.hpp"

namespace sybilid {

Campaign::Campaign(const FieldElement& verifier_id, const FieldElement& campaign_id)
    : verifier_id_(verifier_id), id_(campaign_id) {}

Campaign Campaign::open(const Deployment& d, const FieldElement& verifier_id, std::mt19937_64& rng) {
    return Campaign(verifier_id, d.field().random(rng));
}

FieldElement Campaign::validate_uniqueness(const Nizk& nizk, const Proof& proof, const Vdr& vdr) const {
    if (proof.relation != rel::CampaignNullifier) fail(ErrorCode::RelationMismatch, "expected a campaign nullifier proof");
    if (statement_one(proof, "id_eps") != id_) fail(ErrorCode::UnsatisfiedRelation, "proof is for another campaign");
    if (statement_one(proof, "id_V") != verifier_id_) fail(ErrorCode::UnsatisfiedRelation, "proof names another verifier");
    if (!vdr.identity_window().contains(statement_one(proof, "r_id"))) fail(ErrorCode::StaleRoot, "identity root is not recent");
    const auto& n_s = statement_one(proof, "n_s");
    if (n_s_.count(n_s)) fail(ErrorCode::DuplicateNullifier, "credential already used in this campaign");
    if (!nizk.verify(nizk.setup(rel::CampaignNullifier), proof)) {
        fail(ErrorCode::UnsatisfiedRelation, "campaign nullifier proof rejected");
    }
    return n_s;
}

FieldElement Campaign::validate_association(const Nizk& nizk, const Proof& proof, const Vdr& vdr) const {
    if (proof.relation != rel::IdPresent) fail(ErrorCode::RelationMismatch, "expected an identifier presentation");
    if (statement_one(proof, "id_eps") != id_) fail(ErrorCode::UnsatisfiedRelation, "proof is for another campaign");
    if (!vdr.association_window().contains(statement_one(proof, "r_a"))) {
        fail(ErrorCode::StaleRoot, "association root is not recent");
    }
    const auto& n_a = statement_one(proof, "n_a");
    if (vdr.blocked().count(n_a)) fail(ErrorCode::Blocked, "associated identifier is blocked");
    if (vdr.association_nullifiers().count(n_a)) fail(ErrorCode::StaleAssociation, "association superseded");
    const auto& n_a_eps = statement_one(proof, "n_a_eps");
    if (n_a_eps_.count(n_a_eps)) fail(ErrorCode::DuplicateNullifier, "identifier set already took part in this campaign");
    if (!nizk.verify(nizk.setup(rel::IdPresent), proof)) fail(ErrorCode::UnsatisfiedRelation, "identifier presentation rejected");
    return n_a_eps;
}

void Campaign::check_credential_uniqueness(const Nizk& nizk, const Proof& proof, const Vdr& vdr) {
    n_s_.insert(validate_uniqueness(nizk, proof, vdr));
}

void Campaign::check_association(const Nizk& nizk, const Proof& proof, const Vdr& vdr) {
    n_a_eps_.insert(validate_association(nizk, proof, vdr));
}

void Campaign::admit(const Nizk& nizk, const CampaignSubmission& s, const Vdr& vdr, const IssuerLedger& issuer,
                     const VerifierPolicy& policy) {
    if (!s.bundle && !s.association) fail(ErrorCode::InvalidInput, "empty campaign submission");
    if (s.uniqueness && !s.bundle) fail(ErrorCode::InvalidInput, "credential nullifier without a presentation");
    std::optional<FieldElement> n_s;
    std::optional<FieldElement> n_a_eps;
    if (s.bundle) {
        verify_presentation(nizk, *s.bundle, vdr, issuer, policy);
        if (!s.uniqueness) fail(ErrorCode::InvalidInput, "campaign presentation needs a credential nullifier");
        if (statement_one(*s.uniqueness, "c_c") != statement_one(s.bundle->credential, "c_c")) {
            fail(ErrorCode::UnsatisfiedRelation, "credential nullifier proof is for another commitment");
        }
        n_s = validate_uniqueness(nizk, *s.uniqueness, vdr);
    }
    if (s.association) {
        if (s.bundle) {
            // The identifier named in pi_pre must be the one committed in pi_c.
            const auto& d = nizk.deployment();
            const auto& pc = s.bundle->credential;
            Commitment c_id{statement_one(pc, "c_id")};
            if (!sybilid::open(d, statement_one(*s.association, "id_H"), c_id, statement_one(pc, "u_id"))) {
                fail(ErrorCode::UnsatisfiedRelation, "identifier presentation names another holder");
            }
        }
        n_a_eps = validate_association(nizk, *s.association, vdr);
    }
    if (n_s) n_s_.insert(*n_s);
    if (n_a_eps) n_a_eps_.insert(*n_a_eps);
}

Proof prove_campaign_uniqueness(const Nizk& nizk, const Credential& cred, const FieldElement& sk_H,
                                const FieldElement& u_c, const Vdr& vdr, const Campaign& campaign) {
    const auto& d = nizk.deployment();
    FieldElement digest = cred.digest(d);
    PublicKey pk_H = pubkey_of(d, sk_H);
    auto index = Vdr::find_leaf(vdr.identity_tree(), identity_leaf(d, cred.holder_id, pk_H));
    if (!index) fail(ErrorCode::NotFound, "holder key is not in the identity registry");
    SlotMap stmt{{"id_V", {campaign.verifier_id()}},
                 {"id_eps", {campaign.id()}},
                 {"n_s", {campaign_credential_nullifier(d, digest, sk_H, campaign.id())}},
                 {"c_c", {commit(d, digest, u_c).value}},
                 {"r_id", {vdr.identity_tree().root()}}};
    SlotMap wit{{"cred", cred.packed().pack()},
                {"u_c", {u_c}},
                {"sk_H", {sk_H}},
                {"pk_H", d.group().to_fields(pk_H)},
                {"rho_id", encode_path(d, vdr.identity_tree().prove(*index))}};
    return nizk.prove(nizk.setup(rel::CampaignNullifier), stmt, wit);
}

FieldElement Campaign::state_digest(const Hasher& h) const {
    detail::StateDigestBuilder b(h, "campaign");
    b.add(verifier_id_);
    b.add(id_);
    b.add_set(n_s_);
    b.add_set(n_a_eps_);
    return b.finish();
}

} // namespace sybilid
