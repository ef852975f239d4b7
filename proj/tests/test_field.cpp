#include "oracle.hpp"

#include "sybilid/errors.hpp"

#include <gtest/gtest.h>

using namespace sybilid;
using namespace sybilid::testing;

namespace {

class FieldOracle : public ::testing::TestWithParam<U256> {
protected:
    PrimeField f{GetParam()};
    mpz_class p = to_mpz(GetParam());
    std::mt19937_64 rng{0xf1e1d};
};

TEST_P(FieldOracle, ArithmeticMatchesBigIntegerReference) {
    for (int i = 0; i < 2000; ++i) {
        auto a = f.random(rng);
        auto b = f.random(rng);
        mpz_class A = to_mpz(a), B = to_mpz(b);
        mpz_class sum = (A + B) % p;
        mpz_class diff = ((A - B) % p + p) % p;
        mpz_class prod = (A * B) % p;
        ASSERT_EQ(to_mpz(f.add(a, b)), sum);
        ASSERT_EQ(to_mpz(f.sub(a, b)), diff);
        ASSERT_EQ(to_mpz(f.mul(a, b)), prod);
        ASSERT_EQ(to_mpz(f.neg(a)), (p - A) % p);
    }
}

TEST_P(FieldOracle, InverseAndPowerMatchReference) {
    for (int i = 0; i < 200; ++i) {
        auto a = f.random_nonzero(rng);
        auto e = f.random(rng);
        mpz_class A = to_mpz(a), E = to_mpz(e), inv, pw;
        mpz_invert(inv.get_mpz_t(), A.get_mpz_t(), p.get_mpz_t());
        mpz_powm(pw.get_mpz_t(), A.get_mpz_t(), E.get_mpz_t(), p.get_mpz_t());
        ASSERT_EQ(to_mpz(f.inv(a)), inv);
        ASSERT_EQ(to_mpz(f.pow(a, e.value())), pw);
    }
    EXPECT_THROW(f.inv(f.zero()), ProtocolError);
}

TEST_P(FieldOracle, ReduceMatchesReferenceOnFullWidthInputs) {
    for (int i = 0; i < 500; ++i) {
        U256 v{{rng(), rng(), rng(), rng() >> 1}};
        ASSERT_EQ(to_mpz(f.reduce(v)), to_mpz(v) % p);
    }
}

TEST_P(FieldOracle, HexIsFixedWidthAndRoundTrips) {
    auto w = (static_cast<std::size_t>(mpz_sizeinbase(p.get_mpz_t(), 2)) + 3) / 4;
    EXPECT_EQ(f.hex_width(), w);
    for (int i = 0; i < 200; ++i) {
        auto a = f.random(rng);
        auto hex = f.to_hex(a);
        ASSERT_EQ(hex.size(), w);
        ASSERT_EQ(f.from_hex(hex), a);
        ASSERT_EQ(mpz_class(hex, 16), to_mpz(a));
    }
    EXPECT_EQ(f.to_hex(f.from_u64(0x2a)), std::string(w - 2, '0') + "2a");
    EXPECT_THROW(f.from_hex(GetParam().to_hex()), ProtocolError); // p itself is out of range
    EXPECT_THROW(f.from_hex("xyz"), ProtocolError);
    EXPECT_THROW(f.from_hex(""), ProtocolError);
}

TEST_P(FieldOracle, SignedEmbeddingRoundTrips) {
    for (std::int64_t v : {std::int64_t{0}, std::int64_t{1}, std::int64_t{-1}, std::int64_t{25},
                           std::int64_t{-(std::int64_t{1} << 61)}, (std::int64_t{1} << 62) - 1}) {
        std::int64_t out = 0;
        ASSERT_TRUE(f.to_i64(f.from_i64(v), out));
        EXPECT_EQ(out, v);
    }
    std::int64_t out = 0;
    EXPECT_FALSE(f.to_i64(f.from_hex("100000000000000000000"), out));
    EXPECT_EQ(f.from_i64(25), f.from_u64(25));
    EXPECT_EQ(to_mpz(f.from_i64(-5)), p - 5);
}

TEST_P(FieldOracle, RandomElementsAreCanonical) {
    for (int i = 0; i < 1000; ++i) ASSERT_LT(to_mpz(f.random(rng)), p);
}

INSTANTIATE_TEST_SUITE_P(Moduli, FieldOracle, ::testing::Values(default_field_modulus(), small_modulus()));

TEST(PrimeField, DefaultModulusProperties) {
    mpz_class p = to_mpz(default_field_modulus());
    EXPECT_EQ(mpz_sizeinbase(p.get_mpz_t(), 2), 252U);
    EXPECT_NE(mpz_probab_prime_p(p.get_mpz_t(), 40), 0);
    mpz_class q = 2 * p + 1;
    EXPECT_NE(mpz_probab_prime_p(q.get_mpz_t(), 40), 0);
    mpz_class g, pm1 = p - 1, five = 5;
    mpz_gcd(g.get_mpz_t(), pm1.get_mpz_t(), five.get_mpz_t());
    EXPECT_EQ(g, 1);
}

TEST(PrimeField, RejectsCompositeAndOutOfRangeModuli) {
    EXPECT_THROW(PrimeField(U256::from_hex("a0000000000000000000000000001d01")), ProtocolError); // composite
    EXPECT_THROW(PrimeField(U256::from_u64(65537)), ProtocolError);                              // too small
    mpz_class big = (mpz_class(1) << 255) - 19;                                                   // 255 bits
    EXPECT_THROW(PrimeField(to_u256(big)), ProtocolError);
}

TEST(PrimalityTest, AgreesWithReferenceOnRandomOddNumbers) {
    std::mt19937_64 rng(99);
    int primes = 0;
    for (int i = 0; i < 3000; ++i) {
        U256 v{{rng() | 1U, rng(), 0, 0}};
        bool expected = mpz_probab_prime_p(to_mpz(v).get_mpz_t(), 40) != 0;
        ASSERT_EQ(is_probable_prime(v), expected) << v.to_hex();
        primes += expected;
    }
    EXPECT_GT(primes, 0);
}

TEST(U256, HexParsingAndOrdering) {
    auto a = U256::from_hex("0x1");
    auto b = U256::from_hex("10000000000000000");
    EXPECT_LT(a, b);
    EXPECT_EQ(b.bit_length(), 65);
    EXPECT_TRUE(U256{}.is_zero());
    EXPECT_THROW(U256::from_hex(std::string(65, 'f')), ProtocolError);
}

} // namespace
