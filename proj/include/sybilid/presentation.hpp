#pragma once

#include "sybilid/credential.hpp"
#include "sybilid/issuer_ledger.hpp"
#include "sybilid/nizk.hpp"
#include "sybilid/predicate.hpp"
#include "sybilid/vdr.hpp"

#include <optional>
#include <random>

namespace sybilid {

struct Identity {
    FieldElement id;
    KeyPair keys;
};

/// Signs the credential, records h_rv on the issuer ledger and runs the holder-side audit.
/// Throws CapacityExceeded when the ledger is full, Unauthorized if the ledger belongs to
/// another issuer.
Credential issue_credential(const Deployment& d, const Identity& issuer, const FieldElement& holder_id,
                            std::vector<Claim> claims, IssuerLedger& ledger, std::mt19937_64& rng);

/// Holder check after issuance: the signature verifies under pk_I and the ledger holds
/// H1([digest, u_rv]). Throws IssuanceAudit otherwise.
void audit_issuance(const Deployment& d, const Credential& cred, const PublicKey& issuer_pk, const IssuerLedger& ledger);

/// What a verifier asks of a presentation: which guard, and its public component.
struct VerifierContext {
    ForwardingGuard guard = ForwardingGuard::Challenge;
    FieldElement challenge;       // e_c, when guard is Challenge
    std::optional<PublicKey> pk_V; // when guard is VerifierKey
};

struct PresentationBundle {
    Proof credential; // pi_c, selective disclosure with the identifier and guard clauses
    Proof validity;   // pi_rv, shares c_c with pi_c
};

/// Holder-side result; u_c is needed to attach further proofs to the same c_c.
struct Presentation {
    PresentationBundle bundle;
    FieldElement u_c;
    FieldElement u_id;
};

struct PresentOptions {
    bool mask_signature = false;
};

/// Builds pi_c and pi_rv from snapshots of the registry and issuer ledger.
/// Throws NotFound (claim or identity leaf missing), Revoked, UnsatisfiedRelation (predicate false).
Presentation present(const Nizk& nizk, const EnumRegistry& enums, const Credential& cred, const Predicate& predicate,
                     const FieldElement& sk_H, const VerifierContext& verifier, const Vdr& vdr,
                     const IssuerLedger& issuer, std::mt19937_64& rng, const PresentOptions& options = {});

/// Verifier policy: the predicate it asked for (encoded) and the guard it set up.
struct VerifierPolicy {
    FieldVector predicate;
    VerifierContext context;
    std::optional<FieldElement> sk_V;
};

/// Throws on rejection: StaleRoot, Revoked, ChallengeMismatch, UnsatisfiedRelation, NotFound
/// (issuer not published) or RelationMismatch. Reads the registry and ledger; changes nothing.
void verify_presentation(const Nizk& nizk, const PresentationBundle& bundle, const Vdr& vdr,
                         const IssuerLedger& issuer, const VerifierPolicy& policy);

/// The statement slots that make up the public transcript of a bundle, prefixed by proof.
std::vector<std::pair<std::string, FieldElement>> public_transcript(const PresentationBundle& bundle);

struct NullifierRefresh {
    Proof proof;
    FieldElement u_rv_new;
};

/// Holder side of the proactive nullifier update. Throws Revoked when the current n_rv is
/// already consumed and NotFound when h_rv is not on the ledger.
NullifierRefresh prepare_nullifier_refresh(const Nizk& nizk, const Credential& cred, const IssuerLedger& issuer,
                                           std::mt19937_64& rng);

} // namespace sybilid
