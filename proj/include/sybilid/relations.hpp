#pragma once

#include "sybilid/crypto.hpp"
#include "sybilid/nizk.hpp"

#include <optional>
#include <span>
#include <string>

namespace sybilid {

namespace rel {
inline const std::string SelectiveDisclosure = "REL_SELECTIVE_DISCLOSURE";
inline const std::string HolderId = "REL_HOLDER_ID";
inline const std::string VdrMembership = "REL_VDR_MEMBERSHIP";
inline const std::string VerifierKey = "REL_VERIFIER_KEY";
inline const std::string CredValidity = "REL_CRED_VALIDITY";
inline const std::string CampaignNullifier = "REL_CAMPAIGN_NULLIFIER";
inline const std::string IdRegister = "REL_ID_REGISTER";
inline const std::string IdAssociate = "REL_ID_ASSOCIATE";
inline const std::string IdPresent = "REL_ID_PRESENT";
inline const std::string IdAppend = "REL_ID_APPEND";
inline const std::string IdAggregate = "REL_ID_AGGREGATE";
inline const std::string KeyRefresh = "REL_KEY_REFRESH";
inline const std::string KeyRefreshRand = "REL_KEY_REFRESH_RAND";
inline const std::string NullifierUpdate = "REL_NULLIFIER_UPDATE";
inline const std::string AssocRandRefresh = "REL_ASSOC_RAND_REFRESH";
} // namespace rel

void register_protocol_relations(RelationRegistry& registry);

// Signature presentation modes inside the selective-disclosure statement.
inline constexpr std::uint64_t kSignaturePublic = 0;
inline constexpr std::uint64_t kSignatureMasked = 1;

// Derived values shared by holders, ledgers and relation clauses.

/// v_id = H1([id, pk_lo, pk_hi]) under the identity site.
FieldElement identity_leaf(const Deployment& d, const FieldElement& id, const PublicKey& pk);
/// h_id = H1([id, sk]).
FieldElement registration_leaf(const Deployment& d, const FieldElement& id, const FieldElement& sk);
/// n_reg = H1([id, sk, 1]).
FieldElement registration_nullifier(const Deployment& d, const FieldElement& id, const FieldElement& sk);
/// id_a = H1([id_1..id_n, u_a?]).
FieldElement association_id(const Deployment& d, std::span<const FieldElement> ids, const std::optional<FieldElement>& u_a);
/// n_a = H1([id_1..id_n, u_a?, 1]).
FieldElement association_nullifier(const Deployment& d, std::span<const FieldElement> ids,
                                   const std::optional<FieldElement>& u_a);
/// n_a,eps = H1([id_1..id_n, id_eps]).
FieldElement campaign_association_nullifier(const Deployment& d, std::span<const FieldElement> ids,
                                            const FieldElement& campaign);
/// n_s = H1([cred digest, sk_H, id_eps]).
FieldElement campaign_credential_nullifier(const Deployment& d, const FieldElement& digest, const FieldElement& sk,
                                           const FieldElement& campaign);
/// h_rv = H1([cred digest, u_rv]).
FieldElement revocation_leaf(const Deployment& d, const FieldElement& digest, const FieldElement& u_rv);
/// n_rv = H1([cred digest, u_rv, 1]).
FieldElement revocation_nullifier(const Deployment& d, const FieldElement& digest, const FieldElement& u_rv);

} // namespace sybilid
