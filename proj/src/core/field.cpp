#include "sybilid/field.hpp"

#include "sybilid/errors.hpp"

namespace sybilid {

namespace {

using u128 = unsigned __int128;

int hex_digit(char c) noexcept {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

U256 shr1(const U256& a) noexcept {
    U256 r;
    for (int i = 0; i < 4; ++i) {
        r.limb[i] = a.limb[i] >> 1;
        if (i < 3) r.limb[i] |= a.limb[i + 1] << 63;
    }
    return r;
}

} // namespace

std::uint64_t add_into(U256& a, const U256& b) noexcept {
    std::uint64_t carry = 0;
    for (int i = 0; i < 4; ++i) {
        u128 s = static_cast<u128>(a.limb[i]) + b.limb[i] + carry;
        a.limb[i] = static_cast<std::uint64_t>(s);
        carry = static_cast<std::uint64_t>(s >> 64);
    }
    return carry;
}

std::uint64_t sub_into(U256& a, const U256& b) noexcept {
    std::uint64_t borrow = 0;
    for (int i = 0; i < 4; ++i) {
        u128 d = static_cast<u128>(a.limb[i]) - b.limb[i] - borrow;
        a.limb[i] = static_cast<std::uint64_t>(d);
        borrow = static_cast<std::uint64_t>(d >> 64) & 1U;
    }
    return borrow;
}

U256 U256::from_hex(std::string_view hex) {
    if (hex.starts_with("0x") || hex.starts_with("0X")) hex.remove_prefix(2);
    if (hex.empty() || hex.size() > 64) fail(ErrorCode::InvalidInput, "bad hex length");
    U256 r;
    int nibble = 0;
    for (auto it = hex.rbegin(); it != hex.rend(); ++it, ++nibble) {
        int d = hex_digit(*it);
        if (d < 0) fail(ErrorCode::InvalidInput, "bad hex digit");
        r.limb[nibble / 16] |= static_cast<std::uint64_t>(d) << (4 * (nibble % 16));
    }
    return r;
}

std::string U256::to_hex(std::size_t width) const {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string full(64, '0');
    for (int n = 0; n < 64; ++n) {
        full[63 - n] = kDigits[(limb[n / 16] >> (4 * (n % 16))) & 0xF];
    }
    std::size_t first = full.find_first_not_of('0');
    std::size_t needed = first == std::string::npos ? 1 : 64 - first;
    std::size_t w = std::max(width, needed);
    return full.substr(64 - w);
}

int U256::bit_length() const noexcept {
    for (int i = 3; i >= 0; --i) {
        if (limb[i] != 0) return i * 64 + 64 - __builtin_clzll(limb[i]);
    }
    return 0;
}

MontgomeryContext::MontgomeryContext(const U256& modulus) : m_(modulus) {
    if ((m_.limb[0] & 1U) == 0 || m_.bit_length() > 255 || m_.bit_length() < 2) {
        fail(ErrorCode::InvalidInput, "Montgomery modulus must be odd and below 2^255");
    }
    // Newton iteration for m^{-1} mod 2^64.
    std::uint64_t x = 1;
    for (int i = 0; i < 7; ++i) x *= 2 - m_.limb[0] * x;
    inv_ = ~x + 1;

    // r2 = 2^512 mod m by doubling.
    U256 r = U256::from_u64(1);
    for (int i = 0; i < 512; ++i) {
        std::uint64_t carry = add_into(r, r);
        if (carry || r >= m_) sub_into(r, m_);
    }
    r2_ = r;
    one_ = to_mont(U256::from_u64(1));
}

U256 MontgomeryContext::mul(const U256& a, const U256& b) const noexcept {
    std::uint64_t t[6] = {0, 0, 0, 0, 0, 0};
    for (int i = 0; i < 4; ++i) {
        std::uint64_t c = 0;
        for (int j = 0; j < 4; ++j) {
            u128 s = static_cast<u128>(a.limb[j]) * b.limb[i] + t[j] + c;
            t[j] = static_cast<std::uint64_t>(s);
            c = static_cast<std::uint64_t>(s >> 64);
        }
        u128 s4 = static_cast<u128>(t[4]) + c;
        t[4] = static_cast<std::uint64_t>(s4);
        t[5] = static_cast<std::uint64_t>(s4 >> 64);

        std::uint64_t m = t[0] * inv_;
        u128 s = static_cast<u128>(m) * m_.limb[0] + t[0];
        c = static_cast<std::uint64_t>(s >> 64);
        for (int j = 1; j < 4; ++j) {
            s = static_cast<u128>(m) * m_.limb[j] + t[j] + c;
            t[j - 1] = static_cast<std::uint64_t>(s);
            c = static_cast<std::uint64_t>(s >> 64);
        }
        s = static_cast<u128>(t[4]) + c;
        t[3] = static_cast<std::uint64_t>(s);
        t[4] = t[5] + static_cast<std::uint64_t>(s >> 64);
    }
    U256 r{{t[0], t[1], t[2], t[3]}};
    if (t[4] != 0 || r >= m_) sub_into(r, m_);
    return r;
}

U256 MontgomeryContext::add(const U256& a, const U256& b) const noexcept {
    U256 r = a;
    std::uint64_t carry = add_into(r, b);
    if (carry || r >= m_) sub_into(r, m_);
    return r;
}

U256 MontgomeryContext::sub(const U256& a, const U256& b) const noexcept {
    U256 r = a;
    if (sub_into(r, b)) add_into(r, m_);
    return r;
}

U256 MontgomeryContext::pow(const U256& base, const U256& exponent) const noexcept {
    U256 acc = one_;
    for (int i = exponent.bit_length() - 1; i >= 0; --i) {
        acc = mul(acc, acc);
        if (exponent.bit(i)) acc = mul(acc, base);
    }
    return acc;
}

bool is_probable_prime(const U256& n) {
    static constexpr std::uint64_t kBases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41};
    if (n.bit_length() <= 6) {
        std::uint64_t v = n.limb[0];
        if (v < 2) return false;
        for (std::uint64_t d = 2; d * d <= v; ++d) {
            if (v % d == 0) return false;
        }
        return true;
    }
    if ((n.limb[0] & 1U) == 0) return false;
    for (std::uint64_t b : kBases) {
        // Trial division by the small bases.
        u128 rem = 0;
        for (int i = 3; i >= 0; --i) rem = ((rem << 64) | n.limb[i]) % b;
        if (rem == 0) return false;
    }
    MontgomeryContext ctx(n);
    U256 n_minus_1 = n;
    sub_into(n_minus_1, U256::from_u64(1));
    U256 d = n_minus_1;
    int s = 0;
    while (!d.bit(0)) {
        d = shr1(d);
        ++s;
    }
    const U256 minus_one = ctx.to_mont(n_minus_1);
    for (std::uint64_t b : kBases) {
        U256 x = ctx.pow(ctx.to_mont(U256::from_u64(b)), d);
        if (x == ctx.one() || x == minus_one) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = ctx.mul(x, x);
            if (x == minus_one) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

PrimeField::PrimeField(const U256& p) : mont_(p), bits_(p.bit_length()) {
    if (bits_ < 128 || bits_ > 254) fail(ErrorCode::InvalidInput, "field modulus must have 128..254 bits");
    if (!is_probable_prime(p)) fail(ErrorCode::InvalidInput, "field modulus is not prime");
    half_ = shr1(p);
}

FieldElement PrimeField::from_u64(std::uint64_t v) const noexcept {
    return FieldElement{U256::from_u64(v)};
}

FieldElement PrimeField::from_i64(std::int64_t v) const noexcept {
    if (v >= 0) return from_u64(static_cast<std::uint64_t>(v));
    std::uint64_t mag = ~static_cast<std::uint64_t>(v) + 1;
    return neg(from_u64(mag));
}

FieldElement PrimeField::reduce(const U256& v) const noexcept {
    return FieldElement{mont_.reduce(v)};
}

FieldElement PrimeField::from_canonical(const U256& v) const {
    if (v >= modulus()) fail(ErrorCode::InvalidInput, "value not below field modulus");
    return FieldElement{v};
}

std::string PrimeField::to_hex(const FieldElement& a) const {
    return a.value().to_hex(hex_width());
}

FieldElement PrimeField::from_hex(std::string_view hex) const {
    if (hex.starts_with("0x") || hex.starts_with("0X")) hex.remove_prefix(2);
    if (hex.size() > hex_width()) fail(ErrorCode::InvalidInput, "field hex too wide");
    return from_canonical(U256::from_hex(hex));
}

FieldElement PrimeField::add(const FieldElement& a, const FieldElement& b) const noexcept {
    return FieldElement{mont_.add(a.v_, b.v_)};
}

FieldElement PrimeField::sub(const FieldElement& a, const FieldElement& b) const noexcept {
    return FieldElement{mont_.sub(a.v_, b.v_)};
}

FieldElement PrimeField::neg(const FieldElement& a) const noexcept {
    return FieldElement{mont_.sub(U256{}, a.v_)};
}

FieldElement PrimeField::mul(const FieldElement& a, const FieldElement& b) const noexcept {
    return FieldElement{mont_.from_mont(mont_.mul(mont_.to_mont(a.v_), mont_.to_mont(b.v_)))};
}

FieldElement PrimeField::pow(const FieldElement& a, const U256& e) const noexcept {
    return FieldElement{mont_.from_mont(mont_.pow(mont_.to_mont(a.v_), e))};
}

FieldElement PrimeField::inv(const FieldElement& a) const {
    if (a.is_zero()) fail(ErrorCode::InvalidInput, "inverse of zero");
    U256 e = modulus();
    sub_into(e, U256::from_u64(2));
    return pow(a, e);
}

FieldElement PrimeField::random(std::mt19937_64& rng) const {
    const int top = bits_ - 192; // bits used in the highest limb, 1..64 given bits_ >= 128
    for (;;) {
        U256 v;
        for (auto& l : v.limb) l = rng();
        if (bits_ <= 192) {
            v.limb[3] = 0;
            int t2 = bits_ - 128;
            v.limb[2] &= t2 == 64 ? ~0ULL : ((1ULL << t2) - 1);
        } else {
            v.limb[3] &= top == 64 ? ~0ULL : ((1ULL << top) - 1);
        }
        if (v < modulus()) return FieldElement{v};
    }
}

FieldElement PrimeField::random_nonzero(std::mt19937_64& rng) const {
    for (;;) {
        FieldElement f = random(rng);
        if (!f.is_zero()) return f;
    }
}

bool PrimeField::to_i64(const FieldElement& a, std::int64_t& out) const noexcept {
    U256 mag = a.v_;
    bool negative = false;
    if (mag > half_) {
        mag = modulus();
        sub_into(mag, a.v_);
        negative = true;
    }
    if (mag.limb[1] | mag.limb[2] | mag.limb[3]) return false;
    if (mag.limb[0] > static_cast<std::uint64_t>(INT64_MAX)) return false;
    auto m = static_cast<std::int64_t>(mag.limb[0]);
    out = negative ? -m : m;
    return true;
}

U256 default_field_modulus() {
    return U256::from_hex("a00000000000000000000000000000000000000000000000000000000002d49");
}

} // namespace sybilid
