#include "sybilid/vdr.hpp"

#include "sybilid/errors.hpp"
#include "sybilid/relations.hpp"
#include "state_digest.hpp"

namespace sybilid {

Vdr::Vdr(DeploymentPtr deployment)
    : d_(std::move(deployment)),
      identity_(d_->hasher(), d_->protocol().tree_depth),
      registration_(d_->hasher(), d_->protocol().tree_depth),
      association_(d_->hasher(), d_->protocol().tree_depth),
      identity_window_(d_->protocol().root_window),
      registration_window_(d_->protocol().root_window),
      association_window_(d_->protocol().root_window) {}

void Vdr::publish_identifier(const FieldElement& id, const PublicKey& pk) {
    if (records_.count(id)) fail(ErrorCode::Conflict, "identifier already published");
    if (!d_->group().is_member(pk)) fail(ErrorCode::InvalidInput, "public key is not a group element");
    FieldElement leaf = identity_leaf(*d_, id, pk);
    auto index = identity_.append(leaf);
    identity_window_.push(identity_.root());
    records_[id] = IdentityRecord{pk, index};
}

const IdentityRecord& Vdr::record(const FieldElement& id) const {
    auto it = records_.find(id);
    if (it == records_.end()) fail(ErrorCode::NotFound, "identifier not published");
    return it->second;
}

void Vdr::require_recent(const RootWindow& w, const FieldElement& root, const char* what) const {
    if (!w.contains(root)) fail(ErrorCode::StaleRoot, std::string(what) + " root is not recent");
}

void Vdr::require_live_association(const FieldElement& n_a) const {
    if (blocked_.count(n_a)) fail(ErrorCode::Blocked, "associated identifier is blocked");
    if (n_a_.count(n_a)) fail(ErrorCode::StaleAssociation, "association nullifier already consumed");
}

void Vdr::require_verified(const Nizk& nizk, const std::string& relation, const Proof& proof) const {
    auto crs = nizk.setup(relation);
    if (!nizk.verify(crs, proof)) fail(ErrorCode::UnsatisfiedRelation, relation + " proof rejected");
}

void Vdr::add_association(const FieldElement& id_a) {
    association_.append(id_a);
    association_window_.push(association_.root());
}

void Vdr::register_identifier(const Nizk& nizk, const Proof& proof) {
    if (proof.relation != rel::IdRegister) fail(ErrorCode::RelationMismatch, "expected a registration proof");
    require_recent(identity_window_, statement_one(proof, "r_id"), "identity");
    require_verified(nizk, rel::IdRegister, proof);
    if (registration_.size() >= registration_.capacity()) fail(ErrorCode::CapacityExceeded, "registration tree is full");
    registration_.append(statement_one(proof, "h_id"));
    registration_window_.push(registration_.root());
}

void Vdr::associate(const Nizk& nizk, const Proof& proof) {
    if (proof.relation != rel::IdAssociate) fail(ErrorCode::RelationMismatch, "expected an association proof");
    require_recent(registration_window_, statement_one(proof, "r_reg"), "registration");
    const auto& nulls = statement_slot(proof, "n_reg");
    std::set<FieldElement> fresh;
    for (const auto& n : nulls) {
        if (n_reg_.count(n) || !fresh.insert(n).second) {
            fail(ErrorCode::AlreadyAssociated, "identifier already associated");
        }
    }
    require_verified(nizk, rel::IdAssociate, proof);
    if (association_.size() >= association_.capacity()) fail(ErrorCode::CapacityExceeded, "association tree is full");
    add_association(statement_one(proof, "id_a"));
    n_reg_.insert(fresh.begin(), fresh.end());
}

void Vdr::append_identifier(const Nizk& nizk, const Proof& proof) {
    if (proof.relation != rel::IdAppend) fail(ErrorCode::RelationMismatch, "expected an append proof");
    require_recent(association_window_, statement_one(proof, "r_a"), "association");
    require_recent(registration_window_, statement_one(proof, "r_reg"), "registration");
    const auto& n_a = statement_one(proof, "n_a");
    const auto& n_reg = statement_one(proof, "n_reg_new");
    require_live_association(n_a);
    if (n_reg_.count(n_reg)) fail(ErrorCode::AlreadyAssociated, "identifier already associated");
    require_verified(nizk, rel::IdAppend, proof);
    if (association_.size() >= association_.capacity()) fail(ErrorCode::CapacityExceeded, "association tree is full");
    add_association(statement_one(proof, "id_a_new"));
    n_a_.insert(n_a);
    n_reg_.insert(n_reg);
}

void Vdr::aggregate_identifiers(const Nizk& nizk, const Proof& proof) {
    if (proof.relation != rel::IdAggregate) fail(ErrorCode::RelationMismatch, "expected an aggregation proof");
    require_recent(association_window_, statement_one(proof, "r_a"), "association");
    const auto& n1 = statement_one(proof, "n_a1");
    const auto& n2 = statement_one(proof, "n_a2");
    require_live_association(n1);
    require_live_association(n2);
    if (n1 == n2) fail(ErrorCode::StaleAssociation, "both inputs carry the same association nullifier");
    require_verified(nizk, rel::IdAggregate, proof);
    if (association_.size() >= association_.capacity()) fail(ErrorCode::CapacityExceeded, "association tree is full");
    add_association(statement_one(proof, "id_a_new"));
    n_a_.insert(n1);
    n_a_.insert(n2);
}

void Vdr::refresh_association_randomness(const Nizk& nizk, const Proof& proof) {
    if (proof.relation != rel::AssocRandRefresh) fail(ErrorCode::RelationMismatch, "expected a randomness refresh proof");
    require_recent(association_window_, statement_one(proof, "r_a"), "association");
    const auto& n_a = statement_one(proof, "n_a");
    require_live_association(n_a);
    require_verified(nizk, rel::AssocRandRefresh, proof);
    if (association_.size() >= association_.capacity()) fail(ErrorCode::CapacityExceeded, "association tree is full");
    add_association(statement_one(proof, "id_a_new"));
    n_a_.insert(n_a);
}

void Vdr::refresh_key(const Nizk& nizk, const Proof& proof) {
    const std::string& expected = d_->protocol().randomized_association ? rel::KeyRefreshRand : rel::KeyRefresh;
    if (proof.relation != expected) fail(ErrorCode::RelationMismatch, "expected a " + expected + " proof");
    require_recent(association_window_, statement_one(proof, "r_a"), "association");
    const auto& n_a = statement_one(proof, "n_a");
    require_live_association(n_a);
    const auto& id = statement_one(proof, "id_H");
    const auto& n_reg = statement_one(proof, "n_reg_new");
    const auto& pk_fields = statement_slot(proof, "pk_new");
    const auto& old = record(id);
    if (n_reg_.count(n_reg)) fail(ErrorCode::AlreadyAssociated, "registration nullifier for the new key already recorded");
    require_verified(nizk, expected, proof);
    PublicKey pk = d_->group().from_fields(pk_fields.at(0), pk_fields.at(1));
    if (identity_.size() >= identity_.capacity()) fail(ErrorCode::CapacityExceeded, "identity tree is full");

    identity_.overwrite(old.leaf_index, d_->hasher().h2(d_->field().zero(), d_->field().zero()));
    auto index = identity_.append(identity_leaf(*d_, id, pk));
    identity_window_.reset(identity_.root());
    records_[id] = IdentityRecord{pk, index};
    n_reg_.insert(n_reg);
    if (d_->protocol().consume_na_on_key_refresh) n_a_.insert(n_a);
    ++key_refreshes_;
}

void Vdr::block_associated_identifier(const FieldElement& n_a, const std::string& evidence, bool confirmed) {
    (void)evidence;
    if (!confirmed) fail(ErrorCode::Unauthorized, "blocking requires a confirmed governance decision");
    blocked_.insert(n_a);
}

std::optional<std::uint64_t> Vdr::find_leaf(const MerkleTree& tree, const FieldElement& leaf) {
    const auto& ls = tree.leaves();
    for (std::size_t i = ls.size(); i-- > 0;) {
        if (ls[i] == leaf) return i;
    }
    return std::nullopt;
}

FieldElement Vdr::state_digest() const {
    detail::StateDigestBuilder b(d_->hasher(), "vdr");
    b.add_count(records_.size());
    for (const auto& [id, rec] : records_) {
        b.add(id);
        for (const auto& x : d_->group().to_fields(rec.pk)) b.add(x);
        b.add_count(rec.leaf_index);
    }
    for (const MerkleTree* t : {&identity_, &registration_, &association_}) b.add_tree(*t);
    for (const RootWindow* w : {&identity_window_, &registration_window_, &association_window_}) b.add_window(*w);
    for (const auto* s : {&n_reg_, &n_a_, &blocked_}) b.add_set(*s);
    b.add_count(key_refreshes_);
    return b.finish();
}

} // namespace sybilid
