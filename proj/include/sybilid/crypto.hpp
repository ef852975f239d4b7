#pragma once

#include "sybilid/deployment.hpp"

#include <random>
#include <string>

namespace sybilid {

struct Commitment {
    FieldElement value;

    friend bool operator==(const Commitment&, const Commitment&) = default;
};

using PublicKey = GroupElement;

struct KeyPair {
    FieldElement sk;
    PublicKey pk;
};

/// Schnorr signature in challenge/response form.
struct Signature {
    FieldElement challenge;
    FieldElement response;

    friend bool operator==(const Signature&, const Signature&) = default;
};

// Commitment scheme: commit(m, u) = H1([m, u]) under the commit site.
Commitment commit(const Deployment& d, const FieldElement& message, const FieldElement& opening);
bool open(const Deployment& d, const FieldElement& message, const Commitment& c, const FieldElement& opening);

/// Throws InvalidScalar for sk = 0.
PublicKey pubkey_of(const Deployment& d, const FieldElement& sk);
KeyPair keygen(const Deployment& d, std::mt19937_64& rng);

Signature sign(const Deployment& d, const FieldElement& sk, const FieldElement& digest);
bool verify_sign(const Deployment& d, const PublicKey& pk, const Signature& sig, const FieldElement& digest);

/// Digest of a signature, used when the signature is masked behind a commitment.
FieldElement signature_digest(const Deployment& d, const Signature& sig);

// Hex tuple encodings: "lo,hi" for keys and "challenge,response" for signatures.
std::string encode_public_key(const Deployment& d, const PublicKey& pk);
PublicKey decode_public_key(const Deployment& d, const std::string& text);
std::string encode_signature(const Deployment& d, const Signature& sig);
/// Throws InvalidSignature on malformed input.
Signature decode_signature(const Deployment& d, const std::string& text);

} // namespace sybilid
