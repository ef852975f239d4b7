#pragma once

#include "sybilid/merkle.hpp"
#include "sybilid/nizk.hpp"

#include <optional>
#include <set>

namespace sybilid {

/// Revocation state kept on behalf of one issuer: a tree of h_rv leaves, the bucket of
/// consumed nullifiers n_rv and the window of recent roots.
class IssuerLedger {
public:
    IssuerLedger(DeploymentPtr deployment, const FieldElement& issuer_id);

    const FieldElement& issuer_id() const noexcept { return issuer_id_; }
    const MerkleTree& tree() const noexcept { return tree_; }
    const RootWindow& window() const noexcept { return window_; }
    const std::set<FieldElement>& bucket() const noexcept { return bucket_; }

    /// Appends h_rv and returns the new root. Throws CapacityExceeded when full.
    FieldElement record_issuance(const FieldElement& h_rv);

    /// Inserts n_rv = H1([digest, u_rv, 1]). Throws Unauthorized unless `acting_issuer`
    /// is this ledger's issuer. Idempotent.
    void revoke(const FieldElement& acting_issuer, const FieldElement& digest, const FieldElement& u_rv);

    /// Checks a nullifier-update proof and, if it holds, appends h'_rv and consumes n_rv
    /// together. Throws StaleRoot, Revoked or UnsatisfiedRelation with no state change.
    void accept_nullifier_refresh(const Nizk& nizk, const Proof& proof);

    bool consumed(const FieldElement& n_rv) const { return bucket_.count(n_rv) != 0; }
    /// Most recent index holding `leaf`.
    std::optional<std::uint64_t> find_leaf(const FieldElement& leaf) const;
    MerkleProof prove(std::uint64_t index) const { return tree_.prove(index); }

    FieldElement state_digest() const;

private:
    DeploymentPtr d_;
    FieldElement issuer_id_;
    MerkleTree tree_;
    RootWindow window_;
    std::set<FieldElement> bucket_;
};

} // namespace sybilid
