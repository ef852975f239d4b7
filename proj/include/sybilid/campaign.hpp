#pragma once

#include "sybilid/issuer_ledger.hpp"
#include "sybilid/nizk.hpp"
#include "sybilid/presentation.hpp"
#include "sybilid/vdr.hpp"

#include <optional>
#include <random>
#include <set>

namespace sybilid {

/// Everything a holder submits to take part in a campaign. Either part may be absent,
/// but not both.
struct CampaignSubmission {
    std::optional<PresentationBundle> bundle; // pi_c and pi_rv
    std::optional<Proof> uniqueness;          // pi_s, shares c_c with the bundle
    std::optional<Proof> association;         // pi_pre
};

/// Verifier-side campaign state: the campaign identifier and the consumed nullifiers.
class Campaign {
public:
    Campaign(const FieldElement& verifier_id, const FieldElement& campaign_id);
    static Campaign open(const Deployment& d, const FieldElement& verifier_id, std::mt19937_64& rng);

    const FieldElement& verifier_id() const noexcept { return verifier_id_; }
    const FieldElement& id() const noexcept { return id_; }
    const std::set<FieldElement>& credential_nullifiers() const noexcept { return n_s_; }
    const std::set<FieldElement>& association_nullifiers() const noexcept { return n_a_eps_; }

    /// Checks pi_s and consumes n_s. Throws StaleRoot, DuplicateNullifier or UnsatisfiedRelation.
    void check_credential_uniqueness(const Nizk& nizk, const Proof& proof, const Vdr& vdr);
    /// Checks pi_pre and consumes n_a,eps. Throws StaleRoot, Blocked, StaleAssociation,
    /// DuplicateNullifier or UnsatisfiedRelation.
    void check_association(const Nizk& nizk, const Proof& proof, const Vdr& vdr);

    /// Full admission: verifies every part of the submission, ties the parts together
    /// and consumes all nullifiers, or throws and consumes none.
    void admit(const Nizk& nizk, const CampaignSubmission& submission, const Vdr& vdr, const IssuerLedger& issuer,
               const VerifierPolicy& policy);

    FieldElement state_digest(const Hasher& h) const;

private:
    FieldElement validate_uniqueness(const Nizk& nizk, const Proof& proof, const Vdr& vdr) const;
    FieldElement validate_association(const Nizk& nizk, const Proof& proof, const Vdr& vdr) const;

    FieldElement verifier_id_;
    FieldElement id_;
    std::set<FieldElement> n_s_;
    std::set<FieldElement> n_a_eps_;
};

/// Holder side of pi_s: n_s = H1([cred digest, sk_H, id_eps]) bound to the c_c opened by u_c.
/// Throws UnsatisfiedRelation when the credential was not issued by the campaign's verifier,
/// NotFound when the holder key is not registered.
Proof prove_campaign_uniqueness(const Nizk& nizk, const Credential& cred, const FieldElement& sk_H,
                                const FieldElement& u_c, const Vdr& vdr, const Campaign& campaign);

} // namespace sybilid
