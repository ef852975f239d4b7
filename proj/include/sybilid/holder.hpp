#pragma once

#include "sybilid/nizk.hpp"
#include "sybilid/vdr.hpp"

#include <optional>
#include <random>

namespace sybilid {

/// Holder-side secret record of an associated identifier.
struct AssociationSecret {
    FieldVector ids;
    std::optional<FieldElement> u_a;

    FieldElement id_a(const Deployment& d) const;
    FieldElement n_a(const Deployment& d) const;
};

struct AssociationStep {
    Proof proof;
    AssociationSecret secret; // state after the ledger accepts the proof
};

struct Member {
    FieldElement id;
    FieldElement sk;
};

// Every builder reads a registry snapshot and throws UnsatisfiedRelation when the
// holder's claim is false, including when a leaf it relies on is not in the tree.

Proof prove_registration(const Nizk& nizk, const Vdr& vdr, const Member& m);

AssociationStep prove_association(const Nizk& nizk, const Vdr& vdr, const std::vector<Member>& members,
                                  std::mt19937_64& rng);

AssociationStep prove_append(const Nizk& nizk, const Vdr& vdr, const AssociationSecret& current, const Member& m,
                             std::mt19937_64& rng);

AssociationStep prove_aggregate(const Nizk& nizk, const Vdr& vdr, const AssociationSecret& first,
                                const AssociationSecret& second, std::mt19937_64& rng);

/// Throws UnsatisfiedRelation in a deployment without association randomness.
AssociationStep prove_randomness_refresh(const Nizk& nizk, const Vdr& vdr, const AssociationSecret& current,
                                         std::mt19937_64& rng);

/// The secret is unchanged by a key refresh; only the returned proof is needed.
Proof prove_key_refresh(const Nizk& nizk, const Vdr& vdr, const AssociationSecret& current, const FieldElement& id,
                        const FieldElement& sk_new);

/// Identifier presentation for a campaign (n_a,eps and n_a become public).
Proof prove_identifier_presentation(const Nizk& nizk, const Vdr& vdr, const AssociationSecret& current,
                                    const FieldElement& id, const FieldElement& campaign);

} // namespace sybilid
