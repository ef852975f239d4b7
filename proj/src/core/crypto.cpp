#include "sybilid/crypto.hpp"

#include "sybilid/errors.hpp"

namespace sybilid {

namespace {

std::pair<std::string, std::string> split_pair(const std::string& text) {
    auto comma = text.find(',');
    if (comma == std::string::npos || text.find(',', comma + 1) != std::string::npos) {
        fail(ErrorCode::InvalidInput, "expected two comma-separated hex values");
    }
    return {text.substr(0, comma), text.substr(comma + 1)};
}

FieldElement challenge_for(const Deployment& d, const PublicKey& r, const PublicKey& pk, const FieldElement& digest) {
    FieldVector in = d.group().to_fields(r);
    FieldVector pkf = d.group().to_fields(pk);
    in.insert(in.end(), pkf.begin(), pkf.end());
    in.push_back(digest);
    return d.hasher().h1(in, Site::SigChallenge);
}

} // namespace

Commitment commit(const Deployment& d, const FieldElement& message, const FieldElement& opening) {
    return Commitment{d.hasher().h1({message, opening}, Site::Commit)};
}

bool open(const Deployment& d, const FieldElement& message, const Commitment& c, const FieldElement& opening) {
    return commit(d, message, opening) == c;
}

PublicKey pubkey_of(const Deployment& d, const FieldElement& sk) {
    if (sk.is_zero()) fail(ErrorCode::InvalidScalar, "secret key must be nonzero");
    return d.group().exp_generator(sk);
}

KeyPair keygen(const Deployment& d, std::mt19937_64& rng) {
    FieldElement sk = d.field().random_nonzero(rng);
    return KeyPair{sk, pubkey_of(d, sk)};
}

Signature sign(const Deployment& d, const FieldElement& sk, const FieldElement& digest) {
    const auto& f = d.field();
    PublicKey pk = pubkey_of(d, sk);
    // Deterministic nonce; the counter only matters in the negligible k = 0 case.
    FieldElement k = d.hasher().h1({sk, digest}, Site::SigNonce);
    for (std::uint64_t ctr = 1; k.is_zero(); ++ctr) {
        k = d.hasher().h1({sk, digest, f.from_u64(ctr)}, Site::SigNonce);
    }
    PublicKey r = d.group().exp_generator(k);
    FieldElement e = challenge_for(d, r, pk, digest);
    FieldElement s = f.add(k, f.mul(e, sk));
    return Signature{e, s};
}

bool verify_sign(const Deployment& d, const PublicKey& pk, const Signature& sig, const FieldElement& digest) {
    const auto& g = d.group();
    if (!g.is_member(pk)) return false;
    // R = g^s * pk^(-e)
    FieldElement neg_e = d.field().neg(sig.challenge);
    PublicKey r = g.mul(g.exp_generator(sig.response), g.exp(pk, neg_e));
    return challenge_for(d, r, pk, digest) == sig.challenge;
}

FieldElement signature_digest(const Deployment& d, const Signature& sig) {
    return d.hasher().h1({sig.challenge, sig.response}, Site::SigDigest);
}

std::string encode_public_key(const Deployment& d, const PublicKey& pk) {
    FieldVector v = d.group().to_fields(pk);
    return d.field().to_hex(v[0]) + "," + d.field().to_hex(v[1]);
}

PublicKey decode_public_key(const Deployment& d, const std::string& text) {
    auto [a, b] = split_pair(text);
    PublicKey pk = d.group().from_fields(d.field().from_hex(a), d.field().from_hex(b));
    if (!d.group().is_member(pk)) fail(ErrorCode::InvalidInput, "public key is not a group element");
    return pk;
}

std::string encode_signature(const Deployment& d, const Signature& sig) {
    return d.field().to_hex(sig.challenge) + "," + d.field().to_hex(sig.response);
}

Signature decode_signature(const Deployment& d, const std::string& text) {
    try {
        auto [a, b] = split_pair(text);
        return Signature{d.field().from_hex(a), d.field().from_hex(b)};
    } catch (const ProtocolError& e) {
        fail(ErrorCode::InvalidSignature, e.what());
    }
}

} // namespace sybilid
