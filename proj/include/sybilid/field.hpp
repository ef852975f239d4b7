#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace sybilid {

/// Fixed 256-bit unsigned integer, little-endian 64-bit limbs.
struct U256 {
    std::array<std::uint64_t, 4> limb{};

    static constexpr U256 from_u64(std::uint64_t v) { return U256{{v, 0, 0, 0}}; }
    /// Parses big-endian hex (optional 0x prefix, at most 64 digits).
    static U256 from_hex(std::string_view hex);

    std::string to_hex(std::size_t width = 64) const;
    int bit_length() const noexcept;
    bool bit(int i) const noexcept { return (limb[i / 64] >> (i % 64)) & 1U; }
    bool is_zero() const noexcept { return (limb[0] | limb[1] | limb[2] | limb[3]) == 0; }

    friend bool operator==(const U256&, const U256&) = default;
    friend std::strong_ordering operator<=>(const U256& a, const U256& b) noexcept {
        for (int i = 3; i >= 0; --i) {
            if (a.limb[i] != b.limb[i]) return a.limb[i] <=> b.limb[i];
        }
        return std::strong_ordering::equal;
    }
};

// Carry/borrow-returning helpers.
std::uint64_t add_into(U256& a, const U256& b) noexcept;
std::uint64_t sub_into(U256& a, const U256& b) noexcept;

/// Montgomery arithmetic for an odd modulus below 2^255.
/// Values passed to mul/add/sub/pow are in Montgomery form and below the modulus.
class MontgomeryContext {
public:
    explicit MontgomeryContext(const U256& modulus);

    const U256& modulus() const noexcept { return m_; }
    const U256& one() const noexcept { return one_; }

    U256 to_mont(const U256& a) const noexcept { return mul(a, r2_); }
    U256 from_mont(const U256& a) const noexcept { return mul(a, U256::from_u64(1)); }
    /// Any 256-bit value, reduced and converted out of Montgomery form.
    U256 reduce(const U256& a) const noexcept { return from_mont(mul(a, r2_)); }

    U256 mul(const U256& a, const U256& b) const noexcept;
    U256 add(const U256& a, const U256& b) const noexcept;
    U256 sub(const U256& a, const U256& b) const noexcept;
    U256 pow(const U256& base, const U256& exponent) const noexcept;

private:
    U256 m_;
    U256 r2_;
    U256 one_;
    std::uint64_t inv_ = 0; // -m^{-1} mod 2^64
};

/// Probabilistic primality (Miller-Rabin, fixed bases); exact for small inputs.
bool is_probable_prime(const U256& n);

class PrimeField;

/// Element of Z_p. The value is always canonical (< p); only PrimeField creates them.
class FieldElement {
public:
    constexpr FieldElement() = default;

    const U256& value() const noexcept { return v_; }
    bool is_zero() const noexcept { return v_.is_zero(); }

    friend bool operator==(const FieldElement&, const FieldElement&) = default;
    friend std::strong_ordering operator<=>(const FieldElement& a, const FieldElement& b) noexcept {
        return a.v_ <=> b.v_;
    }

private:
    friend class PrimeField;
    explicit constexpr FieldElement(const U256& v) : v_(v) {}
    U256 v_{};
};

using FieldVector = std::vector<FieldElement>;

class PrimeField {
public:
    /// Throws InvalidInput unless p is an (probable) prime with 128 <= bits(p) <= 254.
    explicit PrimeField(const U256& p);

    const U256& modulus() const noexcept { return mont_.modulus(); }
    int bits() const noexcept { return bits_; }
    std::size_t hex_width() const noexcept { return (static_cast<std::size_t>(bits_) + 3) / 4; }
    const MontgomeryContext& mont() const noexcept { return mont_; }

    FieldElement zero() const noexcept { return FieldElement{}; }
    FieldElement one() const noexcept { return FieldElement{U256::from_u64(1)}; }
    FieldElement from_u64(std::uint64_t v) const noexcept;
    /// Signed embedding: negative values map to p - |v|.
    FieldElement from_i64(std::int64_t v) const noexcept;
    FieldElement reduce(const U256& v) const noexcept;
    /// Throws InvalidInput if v >= p.
    FieldElement from_canonical(const U256& v) const;

    /// Lowercase, fixed width, big-endian.
    std::string to_hex(const FieldElement& a) const;
    /// Accepts up to hex_width() digits; throws InvalidInput on malformed or out-of-range input.
    FieldElement from_hex(std::string_view hex) const;

    FieldElement add(const FieldElement& a, const FieldElement& b) const noexcept;
    FieldElement sub(const FieldElement& a, const FieldElement& b) const noexcept;
    FieldElement neg(const FieldElement& a) const noexcept;
    FieldElement mul(const FieldElement& a, const FieldElement& b) const noexcept;
    FieldElement pow(const FieldElement& a, const U256& e) const noexcept;
    /// Throws InvalidInput for zero.
    FieldElement inv(const FieldElement& a) const;

    /// Uniform sample by rejection.
    FieldElement random(std::mt19937_64& rng) const;
    FieldElement random_nonzero(std::mt19937_64& rng) const;

    /// Interprets a as a signed value in (-p/2, p/2]; returns false if it does not fit in int64.
    bool to_i64(const FieldElement& a, std::int64_t& out) const noexcept;

private:
    MontgomeryContext mont_;
    int bits_;
    U256 half_;
};

/// Default deployment prime: 252 bits, 2p+1 prime, gcd(5, p-1) = 1.
U256 default_field_modulus();

} // namespace sybilid

template <>
struct std::hash<sybilid::FieldElement> {
    std::size_t operator()(const sybilid::FieldElement& f) const noexcept {
        const auto& l = f.value().limb;
        return static_cast<std::size_t>(l[0] ^ (l[1] * 0x9e3779b97f4a7c15ULL) ^ (l[2] << 1) ^ (l[3] >> 1));
    }
};
