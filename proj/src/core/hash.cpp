#include "sybilid/hash.hpp"

#include "sybilid/errors.hpp"

#include <algorithm>
#include <random>
#include <set>

namespace sybilid {

namespace {

constexpr std::array<std::string_view, kSiteCount> kSiteNames{
    "commit",        "credential",     "claim-key",  "string-value", "predicate",   "revocation",
    "identity",      "registration",   "association", "campaign-cred", "campaign-assoc", "sig-nonce",
    "sig-challenge", "sig-digest",     "statement",  "state-digest", "log-chain",   "merkle-node",
};

std::uint64_t fnv1a(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

bool coprime_to_p_minus_1(const PrimeField& field, std::uint64_t alpha) {
    U256 pm1 = field.modulus();
    sub_into(pm1, U256::from_u64(1));
    unsigned __int128 rem = 0;
    for (int i = 3; i >= 0; --i) rem = ((rem << 64) | pm1.limb[i]) % alpha;
    return rem != 0;
}

} // namespace

std::string_view site_name(Site s) noexcept {
    auto i = static_cast<std::size_t>(s);
    return i < kSiteCount ? kSiteNames[i] : "unknown";
}

HashConfig HashConfig::defaults_for(const PrimeField& field) {
    HashConfig cfg;
    for (std::size_t i = 0; i < kSiteCount; ++i) cfg.domain_tags[i] = i + 1;
    for (std::uint64_t a : {5ULL, 3ULL, 7ULL, 11ULL, 13ULL}) {
        if (coprime_to_p_minus_1(field, a)) {
            cfg.alpha = a;
            break;
        }
    }
    return cfg;
}

Hasher::Hasher(const PrimeField& field, HashConfig config) : field_(&field), config_(config) {
    std::set<std::uint64_t> seen;
    for (auto tag : config_.domain_tags) {
        if (tag == 0 || tag >= (1ULL << 62)) fail(ErrorCode::InvalidInput, "domain tag out of range");
        if (!seen.insert(tag).second) fail(ErrorCode::InvalidInput, "duplicate domain tag");
    }
    if (config_.alpha < 3 || !coprime_to_p_minus_1(field, config_.alpha)) {
        fail(ErrorCode::InvalidInput, "S-box exponent is not a permutation of Z_p");
    }
    if (config_.full_rounds <= 0 || config_.full_rounds % 2 != 0 || config_.partial_rounds < 0) {
        fail(ErrorCode::InvalidInput, "bad round counts");
    }

    const auto& mont = field.mont();
    std::mt19937_64 rng(fnv1a(config_.constants_seed) ^ static_cast<std::uint64_t>(field.bits()));
    const int rounds = config_.full_rounds + config_.partial_rounds;
    round_constants_.reserve(static_cast<std::size_t>(rounds) * 3);
    for (int i = 0; i < rounds * 3; ++i) {
        round_constants_.push_back(mont.to_mont(field.random(rng).value()));
    }
    // Cauchy matrix 1/(x_i + y_j), x_i = i, y_j = 3 + j: all denominators distinct and nonzero.
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            auto denom = field.from_u64(static_cast<std::uint64_t>(i + 3 + j));
            mds_[i][j] = mont.to_mont(field.inv(denom).value());
        }
    }
}

U256 Hasher::capacity_word(Site site, std::uint64_t arity) const {
    U256 w{{arity, config_.domain_tags[static_cast<std::size_t>(site)], 0, 0}};
    return field_->mont().to_mont(w);
}

void Hasher::permute(State& s) const {
    const auto& mont = field_->mont();
    auto sbox = [&](U256& x) {
        if (config_.alpha == 5) {
            U256 x2 = mont.mul(x, x);
            U256 x4 = mont.mul(x2, x2);
            x = mont.mul(x4, x);
        } else {
            x = mont.pow(x, U256::from_u64(config_.alpha));
        }
    };
    const int half_full = config_.full_rounds / 2;
    const int total = config_.full_rounds + config_.partial_rounds;
    for (int r = 0; r < total; ++r) {
        for (int i = 0; i < 3; ++i) s[i] = mont.add(s[i], round_constants_[static_cast<std::size_t>(r * 3 + i)]);
        bool full = r < half_full || r >= half_full + config_.partial_rounds;
        if (full) {
            for (auto& x : s) sbox(x);
        } else {
            sbox(s[0]);
        }
        State out{};
        for (int i = 0; i < 3; ++i) {
            U256 acc{};
            for (int j = 0; j < 3; ++j) acc = mont.add(acc, mont.mul(mds_[i][j], s[j]));
            out[i] = acc;
        }
        s = out;
    }
}

FieldElement Hasher::h1(std::span<const FieldElement> inputs, Site site) const {
    if (inputs.empty()) fail(ErrorCode::InvalidInput, "h1 requires at least one input");
    if (site == Site::MerkleNode) fail(ErrorCode::InvalidInput, "merkle-node site is reserved for h2");
    const auto& mont = field_->mont();
    State s{capacity_word(site, inputs.size()), U256{}, U256{}};
    for (std::size_t i = 0; i < inputs.size(); i += 2) {
        s[1] = mont.add(s[1], mont.to_mont(inputs[i].value()));
        if (i + 1 < inputs.size()) s[2] = mont.add(s[2], mont.to_mont(inputs[i + 1].value()));
        permute(s);
    }
    return field_->from_canonical(mont.from_mont(s[1]));
}

FieldElement Hasher::h2(const FieldElement& left, const FieldElement& right) const {
    const auto& mont = field_->mont();
    State s{capacity_word(Site::MerkleNode, 0), mont.to_mont(left.value()), mont.to_mont(right.value())};
    permute(s);
    return field_->from_canonical(mont.from_mont(s[1]));
}

FieldElement Hasher::hash_bytes(std::string_view bytes, Site site) const {
    FieldVector words;
    words.reserve(1 + bytes.size() / 15 + 1);
    words.push_back(field_->from_u64(bytes.size()));
    for (std::size_t off = 0; off < bytes.size(); off += 15) {
        U256 w;
        std::size_t n = std::min<std::size_t>(15, bytes.size() - off);
        for (std::size_t k = 0; k < n; ++k) {
            unsigned char c = static_cast<unsigned char>(bytes[off + k]);
            std::size_t shift = 8 * (n - 1 - k);
            w.limb[shift / 64] |= static_cast<std::uint64_t>(c) << (shift % 64);
        }
        words.push_back(field_->from_canonical(w));
    }
    return h1(words, site);
}

} // namespace sybilid
