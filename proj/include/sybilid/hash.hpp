#pragma once

#include "sybilid/field.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace sybilid {

/// Protocol usage sites for H1. Each carries its own domain tag.
enum class Site : std::uint8_t {
    Commit = 0,
    Credential,
    ClaimKey,
    StringValue,
    Predicate,
    Revocation,     // h_rv and n_rv
    Identity,       // v_id
    Registration,   // h_id and n_reg
    Association,    // id_a and n_a
    CampaignCred,   // n_s
    CampaignAssoc,  // n_a,epsilon
    SigNonce,
    SigChallenge,
    SigDigest,
    Statement,
    StateDigest,
    LogChain,
    MerkleNode,     // reserved for h2
    Count_
};

inline constexpr std::size_t kSiteCount = static_cast<std::size_t>(Site::Count_);

std::string_view site_name(Site s) noexcept;

/// Sponge instantiation: width-3 algebraic permutation (x^alpha S-box, Cauchy MDS)
/// with rate 2 and capacity 1. The capacity word is seeded with the site tag and arity.
struct HashConfig {
    std::uint64_t alpha = 5;
    int full_rounds = 8;
    int partial_rounds = 57;
    std::array<std::uint64_t, kSiteCount> domain_tags{};
    std::string_view constants_seed = "sybilid.sponge.v1";

    /// Tags 1..N in Site order; alpha chosen as the smallest of {5,3,7,11,13} coprime to p-1.
    static HashConfig defaults_for(const PrimeField& field);
};

class Hasher {
public:
    /// Throws InvalidInput on duplicate domain tags or an alpha that is not a permutation exponent.
    Hasher(const PrimeField& field, HashConfig config);

    const PrimeField& field() const noexcept { return *field_; }
    const HashConfig& config() const noexcept { return config_; }

    /// Variable-arity hash; throws InvalidInput on an empty input list.
    FieldElement h1(std::span<const FieldElement> inputs, Site site) const;
    FieldElement h1(std::initializer_list<FieldElement> inputs, Site site) const {
        return h1(std::span<const FieldElement>(inputs.begin(), inputs.size()), site);
    }
    /// 2-to-1 compression for Merkle interior nodes.
    FieldElement h2(const FieldElement& left, const FieldElement& right) const;

    /// Byte strings packed 15 bytes per element, length-prefixed.
    FieldElement hash_bytes(std::string_view bytes, Site site) const;

private:
    using State = std::array<U256, 3>; // Montgomery form
    void permute(State& s) const;
    U256 capacity_word(Site site, std::uint64_t arity) const;

    const PrimeField* field_;
    HashConfig config_;
    std::vector<U256> round_constants_; // (full + partial) * 3, Montgomery form
    std::array<std::array<U256, 3>, 3> mds_{};
};

} // namespace sybilid
