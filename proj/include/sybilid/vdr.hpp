#pragma once

#include "sybilid/crypto.hpp"
#include "sybilid/merkle.hpp"
#include "sybilid/nizk.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>

namespace sybilid {

struct IdentityRecord {
    PublicKey pk;
    std::uint64_t leaf_index = 0; // position of the current v_id in the identity tree
};

/// Verifiable data registry: identity records and the identity, registration and
/// association trees with their nullifier buckets.
///
/// Every mutating call validates fully before touching state, so a rejected request
/// leaves the registry unchanged. Copies are independent snapshots.
class Vdr {
public:
    explicit Vdr(DeploymentPtr deployment);

    const Deployment& deployment() const noexcept { return *d_; }

    /// Throws Conflict for a duplicate id.
    void publish_identifier(const FieldElement& id, const PublicKey& pk);
    /// Throws NotFound.
    const IdentityRecord& record(const FieldElement& id) const;
    bool has_record(const FieldElement& id) const { return records_.count(id) != 0; }
    const std::map<FieldElement, IdentityRecord>& records() const noexcept { return records_; }

    // Phase one: registration of h_id. Throws StaleRoot or UnsatisfiedRelation.
    void register_identifier(const Nizk& nizk, const Proof& proof);
    // Phase two: association. Throws StaleRoot, AlreadyAssociated or UnsatisfiedRelation.
    void associate(const Nizk& nizk, const Proof& proof);
    // Throws StaleRoot, StaleAssociation, AlreadyAssociated or UnsatisfiedRelation.
    void append_identifier(const Nizk& nizk, const Proof& proof);
    void aggregate_identifiers(const Nizk& nizk, const Proof& proof);
    void refresh_association_randomness(const Nizk& nizk, const Proof& proof);
    /// Replaces the key of the identifier named in the proof. The previous identity leaf is
    /// overwritten with the empty leaf and the identity root window restarts, so proofs
    /// against any earlier identity root are no longer accepted.
    void refresh_key(const Nizk& nizk, const Proof& proof);

    /// Throws Unauthorized unless confirmed.
    void block_associated_identifier(const FieldElement& n_a, const std::string& evidence, bool confirmed);

    const MerkleTree& identity_tree() const noexcept { return identity_; }
    const MerkleTree& registration_tree() const noexcept { return registration_; }
    const MerkleTree& association_tree() const noexcept { return association_; }
    const RootWindow& identity_window() const noexcept { return identity_window_; }
    const RootWindow& registration_window() const noexcept { return registration_window_; }
    const RootWindow& association_window() const noexcept { return association_window_; }
    const std::set<FieldElement>& registration_nullifiers() const noexcept { return n_reg_; }
    const std::set<FieldElement>& association_nullifiers() const noexcept { return n_a_; }
    const std::set<FieldElement>& blocked() const noexcept { return blocked_; }
    std::uint64_t key_refreshes() const noexcept { return key_refreshes_; }

    /// Most recent index holding the leaf, if any.
    static std::optional<std::uint64_t> find_leaf(const MerkleTree& tree, const FieldElement& leaf);

    FieldElement state_digest() const;

private:
    void require_recent(const RootWindow& w, const FieldElement& root, const char* what) const;
    void require_live_association(const FieldElement& n_a) const;
    void require_verified(const Nizk& nizk, const std::string& relation, const Proof& proof) const;
    void add_association(const FieldElement& id_a);

    DeploymentPtr d_;
    std::map<FieldElement, IdentityRecord> records_;
    MerkleTree identity_;
    MerkleTree registration_;
    MerkleTree association_;
    RootWindow identity_window_;
    RootWindow registration_window_;
    RootWindow association_window_;
    std::set<FieldElement> n_reg_;
    std::set<FieldElement> n_a_;
    std::set<FieldElement> blocked_;
    std::uint64_t key_refreshes_ = 0;
};

} // namespace sybilid
