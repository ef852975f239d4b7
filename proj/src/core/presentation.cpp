#include "sybilid/presentation.hpp"

#include "sybilid/errors.hpp"
#include "sybilid/relations.hpp"

namespace sybilid {

Credential issue_credential(const Deployment& d, const Identity& issuer, const FieldElement& holder_id,
                            std::vector<Claim> claims, IssuerLedger& ledger, std::mt19937_64& rng) {
    if (ledger.issuer_id() != issuer.id) fail(ErrorCode::Unauthorized, "ledger belongs to another issuer");
    Credential cred;
    cred.issuer_id = issuer.id;
    cred.holder_id = holder_id;
    cred.claims = canonical_claims(std::move(claims));
    FieldElement digest = cred.digest(d);
    cred.signature = sign(d, issuer.keys.sk, digest);
    cred.u_rv = d.field().random(rng);
    ledger.record_issuance(revocation_leaf(d, digest, cred.u_rv));
    audit_issuance(d, cred, issuer.keys.pk, ledger);
    return cred;
}

void audit_issuance(const Deployment& d, const Credential& cred, const PublicKey& issuer_pk, const IssuerLedger& ledger) {
    FieldElement digest = cred.digest(d);
    if (!verify_sign(d, issuer_pk, cred.signature, digest)) fail(ErrorCode::IssuanceAudit, "issuer signature does not verify");
    if (ledger.issuer_id() != cred.issuer_id) fail(ErrorCode::IssuanceAudit, "credential recorded on another issuer's ledger");
    if (!ledger.find_leaf(revocation_leaf(d, digest, cred.u_rv))) {
        fail(ErrorCode::IssuanceAudit, "issuer ledger does not hold the expected revocation leaf");
    }
}

Presentation present(const Nizk& nizk, const EnumRegistry& enums, const Credential& cred, const Predicate& predicate,
                     const FieldElement& sk_H, const VerifierContext& verifier, const Vdr& vdr,
                     const IssuerLedger& issuer, std::mt19937_64& rng, const PresentOptions& options) {
    const auto& d = nizk.deployment();
    const auto& f = d.field();
    const Claim* claim = cred.find(predicate.key);
    if (!claim) fail(ErrorCode::NotFound, "credential has no claim '" + predicate.key + "'");
    BoundPredicate bound = bind_predicate(d, enums, predicate, ClaimSchema{claim->value.kind, claim->value.table});
    if (!evaluate_predicate(d, bound.encoding, EncodedClaim{claim->key_digest, claim->kind_code, claim->encoded})) {
        fail(ErrorCode::UnsatisfiedRelation, "claim does not satisfy '" + predicate_to_text(predicate) + "'");
    }

    FieldElement digest = cred.digest(d);
    FieldElement n_rv = revocation_nullifier(d, digest, cred.u_rv);
    if (issuer.consumed(n_rv)) fail(ErrorCode::Revoked, "credential revoked");
    auto rv_index = issuer.find_leaf(revocation_leaf(d, digest, cred.u_rv));
    if (!rv_index) fail(ErrorCode::NotFound, "revocation leaf not on the issuer ledger");

    PublicKey pk_H = pubkey_of(d, sk_H);
    auto id_index = Vdr::find_leaf(vdr.identity_tree(), identity_leaf(d, cred.holder_id, pk_H));
    if (!id_index) fail(ErrorCode::NotFound, "holder key is not in the identity registry");
    const auto& issuer_record = vdr.record(cred.issuer_id);

    Presentation out;
    out.u_c = f.random(rng);
    out.u_id = f.random(rng);
    FieldVector packed = cred.packed().pack();
    FieldElement c_c = commit(d, digest, out.u_c).value;

    SlotMap stmt;
    stmt["c_c"] = {c_c};
    stmt["id_I"] = {cred.issuer_id};
    stmt["pk_I"] = d.group().to_fields(issuer_record.pk);
    stmt["phi"] = bound.encoding;
    stmt["r_id"] = {vdr.identity_tree().root()};
    stmt["c_id"] = {commit(d, cred.holder_id, out.u_id).value};
    stmt["u_id"] = {out.u_id};
    SlotMap wit;
    wit["cred"] = packed;
    wit["u_c"] = {out.u_c};
    wit["sk_H"] = {sk_H};
    wit["pk_H"] = d.group().to_fields(pk_H);
    wit["rho_id"] = encode_path(d, vdr.identity_tree().prove(*id_index));
    if (options.mask_signature) {
        FieldElement u_sig = f.random(rng);
        stmt["sig_mode"] = {f.from_u64(kSignatureMasked)};
        stmt["sig"] = {commit(d, signature_digest(d, cred.signature), u_sig).value};
        wit["sig_hidden"] = {cred.signature.challenge, cred.signature.response};
        wit["u_sig"] = {u_sig};
    } else {
        stmt["sig_mode"] = {f.from_u64(kSignaturePublic)};
        stmt["sig"] = {cred.signature.challenge, cred.signature.response};
    }
    stmt["guard"] = {f.from_u64(static_cast<std::uint64_t>(verifier.guard))};
    if (verifier.guard == ForwardingGuard::VerifierKey) {
        if (!verifier.pk_V) fail(ErrorCode::InvalidInput, "verifier key guard needs pk_V");
        stmt["guard_value"] = d.group().to_fields(*verifier.pk_V);
    } else {
        stmt["guard_value"] = {verifier.challenge};
    }
    out.bundle.credential = nizk.prove(nizk.setup(rel::SelectiveDisclosure), stmt, wit);

    SlotMap vstmt{{"c_c", {c_c}}, {"r_rv", {issuer.tree().root()}}, {"n_rv", {n_rv}}};
    SlotMap vwit{{"cred", packed},
                 {"u_c", {out.u_c}},
                 {"rho_rv", encode_path(d, issuer.prove(*rv_index))},
                 {"u_rv", {cred.u_rv}}};
    out.bundle.validity = nizk.prove(nizk.setup(rel::CredValidity), vstmt, vwit);
    return out;
}

void verify_presentation(const Nizk& nizk, const PresentationBundle& bundle, const Vdr& vdr,
                         const IssuerLedger& issuer, const VerifierPolicy& policy) {
    const auto& d = nizk.deployment();
    const auto& pc = bundle.credential;
    const auto& pv = bundle.validity;
    if (pc.relation != rel::SelectiveDisclosure || pv.relation != rel::CredValidity) {
        fail(ErrorCode::RelationMismatch, "bundle does not carry the expected proofs");
    }
    if (statement_one(pc, "c_c") != statement_one(pv, "c_c")) {
        fail(ErrorCode::UnsatisfiedRelation, "component proofs commit to different credentials");
    }
    const auto& id_I = statement_one(pc, "id_I");
    if (id_I != issuer.issuer_id()) fail(ErrorCode::UnsatisfiedRelation, "credential names another issuer");
    if (statement_slot(pc, "pk_I") != d.group().to_fields(vdr.record(id_I).pk)) {
        fail(ErrorCode::UnsatisfiedRelation, "issuer key differs from the registry record");
    }
    if (statement_slot(pc, "phi") != policy.predicate) fail(ErrorCode::UnsatisfiedRelation, "predicate differs from the request");

    const auto& ctx = policy.context;
    SlotMap verifier_witness;
    if (statement_one(pc, "guard") != d.field().from_u64(static_cast<std::uint64_t>(ctx.guard))) {
        fail(ErrorCode::ChallengeMismatch, "presentation uses another forwarding guard");
    }
    if (ctx.guard == ForwardingGuard::Challenge) {
        if (statement_slot(pc, "guard_value") != FieldVector{ctx.challenge}) {
            fail(ErrorCode::ChallengeMismatch, "presentation bound to another challenge");
        }
    } else {
        if (!ctx.pk_V || statement_slot(pc, "guard_value") != d.group().to_fields(*ctx.pk_V)) {
            fail(ErrorCode::ChallengeMismatch, "presentation bound to another verifier key");
        }
        if (policy.sk_V) verifier_witness["sk_V"] = {*policy.sk_V};
    }

    if (!vdr.identity_window().contains(statement_one(pc, "r_id"))) fail(ErrorCode::StaleRoot, "identity root is not recent");
    if (!issuer.window().contains(statement_one(pv, "r_rv"))) fail(ErrorCode::StaleRoot, "revocation root is not recent");
    if (issuer.consumed(statement_one(pv, "n_rv"))) fail(ErrorCode::Revoked, "credential revoked");

    if (!nizk.verify(nizk.setup(rel::SelectiveDisclosure), pc, verifier_witness)) {
        fail(ErrorCode::UnsatisfiedRelation, "credential proof rejected");
    }
    if (!nizk.verify(nizk.setup(rel::CredValidity), pv)) fail(ErrorCode::UnsatisfiedRelation, "validity proof rejected");
}

std::vector<std::pair<std::string, FieldElement>> public_transcript(const PresentationBundle& bundle) {
    std::vector<std::pair<std::string, FieldElement>> out;
    for (const auto* p : {&bundle.credential, &bundle.validity}) {
        for (const auto& [name, values] : p->statement) {
            for (std::size_t i = 0; i < values.size(); ++i) {
                out.emplace_back(p->relation + "." + name + "[" + std::to_string(i) + "]", values[i]);
            }
        }
    }
    return out;
}

NullifierRefresh prepare_nullifier_refresh(const Nizk& nizk, const Credential& cred, const IssuerLedger& issuer,
                                           std::mt19937_64& rng) {
    const auto& d = nizk.deployment();
    FieldElement digest = cred.digest(d);
    FieldElement n_rv = revocation_nullifier(d, digest, cred.u_rv);
    if (issuer.consumed(n_rv)) fail(ErrorCode::Revoked, "revocation nullifier already consumed");
    auto index = issuer.find_leaf(revocation_leaf(d, digest, cred.u_rv));
    if (!index) fail(ErrorCode::NotFound, "revocation leaf not on the issuer ledger");
    NullifierRefresh out;
    out.u_rv_new = d.field().random(rng);
    SlotMap stmt{{"r_rv", {issuer.tree().root()}}, {"n_rv", {n_rv}}, {"h_rv_new", {revocation_leaf(d, digest, out.u_rv_new)}}};
    SlotMap wit{{"cred", cred.packed().pack()},
                {"rho_rv", encode_path(d, issuer.prove(*index))},
                {"u_rv", {cred.u_rv}},
                {"u_rv_new", {out.u_rv_new}}};
    out.proof = nizk.prove(nizk.setup(rel::NullifierUpdate), stmt, wit);
    return out;
}

} // namespace sybilid
