#include "sybilid/issuer_ledger.hpp"

#include "sybilid/errors.hpp"
#include "sybilid/relations.hpp"
#include "state_digest.hpp"

namespace sybilid {

IssuerLedger::IssuerLedger(DeploymentPtr deployment, const FieldElement& issuer_id)
    : d_(std::move(deployment)),
      issuer_id_(issuer_id),
      tree_(d_->hasher(), d_->protocol().tree_depth),
      window_(d_->protocol().root_window) {}

FieldElement IssuerLedger::record_issuance(const FieldElement& h_rv) {
    tree_.append(h_rv);
    window_.push(tree_.root());
    return tree_.root();
}

void IssuerLedger::revoke(const FieldElement& acting_issuer, const FieldElement& digest, const FieldElement& u_rv) {
    if (acting_issuer != issuer_id_) fail(ErrorCode::Unauthorized, "only the issuer may revoke its credentials");
    bucket_.insert(revocation_nullifier(*d_, digest, u_rv));
}

void IssuerLedger::accept_nullifier_refresh(const Nizk& nizk, const Proof& proof) {
    auto crs = nizk.setup(rel::NullifierUpdate);
    if (proof.relation != crs.relation) fail(ErrorCode::RelationMismatch, "expected a nullifier-update proof");
    auto slot = [&](const char* name) -> const FieldElement& { return statement_one(proof, name); };
    if (!window_.contains(slot("r_rv"))) fail(ErrorCode::StaleRoot, "revocation root is not recent");
    if (consumed(slot("n_rv"))) fail(ErrorCode::Revoked, "revocation nullifier already consumed");
    if (!nizk.verify(crs, proof)) fail(ErrorCode::UnsatisfiedRelation, "nullifier-update proof rejected");
    if (tree_.size() >= tree_.capacity()) fail(ErrorCode::CapacityExceeded, "revocation tree is full");
    record_issuance(slot("h_rv_new"));
    bucket_.insert(slot("n_rv"));
}

std::optional<std::uint64_t> IssuerLedger::find_leaf(const FieldElement& leaf) const {
    const auto& ls = tree_.leaves();
    for (std::size_t i = ls.size(); i-- > 0;) {
        if (ls[i] == leaf) return i;
    }
    return std::nullopt;
}

FieldElement IssuerLedger::state_digest() const {
    detail::StateDigestBuilder b(d_->hasher(), "issuer-ledger");
    b.add(issuer_id_);
    b.add_tree(tree_);
    b.add_window(window_);
    b.add_set(bucket_);
    return b.finish();
}

} // namespace sybilid
