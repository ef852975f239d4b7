#include "oracle.hpp"

#include "sybilid/credential.hpp"
#include "sybilid/errors.hpp"
#include "sybilid/predicate.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace sybilid;
using namespace sybilid::testing;

namespace {

ClaimValue int_value(std::int64_t v) {
    ClaimValue c;
    c.kind = ClaimKind::Int;
    c.integer = v;
    return c;
}

ClaimValue enum_value(const std::string& table, const std::string& label) {
    ClaimValue c;
    c.kind = ClaimKind::Enum;
    c.table = table;
    c.text = label;
    return c;
}

ClaimValue str_value(const std::string& s) {
    ClaimValue c;
    c.kind = ClaimKind::String;
    c.text = s;
    return c;
}

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const ProtocolError& e) {
        return e.code();
    }
    return ErrorCode::Ok;
}

class CredentialTest : public ::testing::Test {
protected:
    DeploymentPtr dp = default_deployment();
    const Deployment& d = *dp;
    const PrimeField& f = d.field();
    EnumRegistry enums = EnumRegistry::with_builtins();
    std::mt19937_64 rng{31};

    bool holds(const std::string& text, const Claim& claim) {
        auto p = parse_predicate(text);
        auto bound = bind_predicate(d, enums, p, ClaimSchema{claim.value.kind, claim.value.table});
        return evaluate_predicate(d, bound.encoding, EncodedClaim{claim.key_digest, claim.kind_code, claim.encoded});
    }
};

TEST_F(CredentialTest, SmallIntegersEmbedDirectly) {
    EXPECT_EQ(encode_claim_value(d, enums, int_value(25)), f.from_u64(25));
    EXPECT_EQ(code_of([&] { encode_claim_value(d, enums, int_value(kMaxClaimMagnitude)); }), ErrorCode::EncodingError);
    EXPECT_EQ(code_of([&] { encode_claim_value(d, enums, int_value(-kMaxClaimMagnitude)); }), ErrorCode::EncodingError);
}

TEST_F(CredentialTest, EnumsEncodeToRegisteredCodes) {
    EXPECT_EQ(encode_claim_value(d, enums, enum_value("blood", "AB")), f.from_u64(4));
    EXPECT_EQ(encode_claim_value(d, enums, enum_value("grade", "A")), f.from_u64(1));
    EXPECT_EQ(code_of([&] { encode_claim_value(d, enums, enum_value("blood", "Z")); }), ErrorCode::EncodingError);
    EXPECT_EQ(code_of([&] { encode_claim_value(d, enums, enum_value("nope", "A")); }), ErrorCode::EncodingError);
    EXPECT_EQ(code_of([&] { enums.add("blood", {"X"}); }), ErrorCode::Conflict);
    enums.add("tier", {"gold", "silver"});
    EXPECT_EQ(enums.code("tier", "silver"), 2U);
    EXPECT_EQ(enums.label("tier", 1), "gold");
}

TEST_F(CredentialTest, StringsEncodeInjectively) {
    std::set<FieldElement> seen;
    std::set<std::string> inputs;
    for (int i = 0; i < 1000; ++i) {
        std::string s(31, ' ');
        for (auto& c : s) c = static_cast<char>(rng() & 0xff);
        if (!inputs.insert(s).second) continue;
        ASSERT_TRUE(seen.insert(encode_claim_value(d, enums, str_value(s))).second);
    }
    EXPECT_EQ(code_of([&] { encode_claim_value(d, enums, str_value(std::string(32, 'a'))); }), ErrorCode::EncodingError);
    EXPECT_NE(encode_claim_value(d, enums, str_value("")), encode_claim_value(d, enums, str_value(std::string(1, '\0'))));
}

TEST_F(CredentialTest, DigestIsIndependentOfClaimOrder) {
    auto a = make_claim(d, enums, "age", int_value(25));
    auto b = make_claim(d, enums, "grade", enum_value("grade", "B"));
    auto c = make_claim(d, enums, "name", str_value("Alice"));
    Credential x, y;
    x.issuer_id = y.issuer_id = f.from_u64(1);
    x.holder_id = y.holder_id = f.from_u64(2);
    x.claims = canonical_claims({a, b, c});
    y.claims = canonical_claims({c, a, b});
    EXPECT_EQ(x.digest(d), y.digest(d));

    FieldVector expected{x.issuer_id, x.holder_id};
    for (const auto& cl : x.claims) {
        expected.push_back(cl.key_digest);
        expected.push_back(f.from_u64(static_cast<std::uint64_t>(cl.value.kind)));
        expected.push_back(cl.encoded);
    }
    EXPECT_EQ(x.digest(d), d.hasher().h1(expected, Site::Credential));
    EXPECT_EQ(code_of([&] { canonical_claims({a, a}); }), ErrorCode::InvalidInput);
    EXPECT_EQ(code_of([&] { make_claim(d, enums, "", int_value(1)); }), ErrorCode::InvalidInput);
}

TEST_F(CredentialTest, PackedLayoutRoundTrips) {
    Credential x;
    x.issuer_id = f.from_u64(7);
    x.holder_id = f.from_u64(8);
    x.claims = canonical_claims({make_claim(d, enums, "age", int_value(3)), make_claim(d, enums, "blood", enum_value("blood", "O"))});
    auto packed = x.packed().pack();
    EXPECT_EQ(packed.size(), 2U + 3U * 2U);
    auto back = PackedCredential::unpack(packed);
    ASSERT_TRUE(back);
    EXPECT_EQ(back->pack(), packed);
    packed.pop_back();
    EXPECT_FALSE(PackedCredential::unpack(packed));
}

TEST_F(CredentialTest, TextFormRoundTrips) {
    auto kp = keygen(d, rng);
    Credential x;
    x.issuer_id = f.random(rng);
    x.holder_id = f.random(rng);
    x.claims = canonical_claims({make_claim(d, enums, "age", int_value(-4)), make_claim(d, enums, "name", str_value("Bob")),
                                 make_claim(d, enums, "blood", enum_value("blood", "AB"))});
    x.signature = sign(d, kp.sk, x.digest(d));
    x.u_rv = f.random(rng);
    auto text = credential_to_text(d, x);
    auto y = credential_from_text(d, enums, text);
    EXPECT_EQ(credential_to_text(d, y), text);
    EXPECT_EQ(y.digest(d), x.digest(d));
    EXPECT_EQ(y.signature, x.signature);
    EXPECT_EQ(code_of([&] { credential_from_text(d, enums, "{"); }), ErrorCode::InvalidInput);
    EXPECT_EQ(code_of([&] { credential_from_text(d, enums, "{}"); }), ErrorCode::InvalidInput);
}

TEST_F(CredentialTest, PaperScenarioPredicates) {
    auto age = make_claim(d, enums, "age", int_value(25));
    auto grade = make_claim(d, enums, "grade", enum_value("grade", "B"));
    auto blood_ab = make_claim(d, enums, "blood", enum_value("blood", "AB"));
    auto blood_o = make_claim(d, enums, "blood", enum_value("blood", "O"));
    EXPECT_TRUE(holds("age >= 18", age));
    EXPECT_FALSE(holds("age < 18", age));
    EXPECT_TRUE(holds("grade in {A,B,C}", grade));
    EXPECT_FALSE(holds("grade in {C,D}", grade));
    EXPECT_FALSE(holds("blood != AB", blood_ab));
    EXPECT_TRUE(holds("blood != AB", blood_o));
    EXPECT_TRUE(holds("blood notin {AB}", blood_o));
    EXPECT_TRUE(holds("blood not in {A, AB}", blood_o));
    EXPECT_TRUE(holds("age > 17 and age < 65", age));
    EXPECT_TRUE(holds("(age < 10) or (age == 25)", age));
}

// Reference evaluator over raw values; integers compared natively, enums by label.
bool reference_eval(const Predicate& p, const ClaimValue& v) {
    switch (p.kind) {
    case Predicate::Kind::Compare: {
        if (v.kind == ClaimKind::Int) {
            std::int64_t c = std::stoll(p.constants[0]);
            switch (p.op) {
            case CmpOp::Lt: return v.integer < c;
            case CmpOp::Le: return v.integer <= c;
            case CmpOp::Eq: return v.integer == c;
            case CmpOp::Ne: return v.integer != c;
            case CmpOp::Ge: return v.integer >= c;
            case CmpOp::Gt: return v.integer > c;
            }
        }
        bool eq = v.text == p.constants[0];
        return p.op == CmpOp::Eq ? eq : !eq;
    }
    case Predicate::Kind::In:
    case Predicate::Kind::NotIn: {
        bool in = false;
        for (const auto& c : p.constants) in |= v.kind == ClaimKind::Int ? v.integer == std::stoll(c) : v.text == c;
        return p.kind == Predicate::Kind::In ? in : !in;
    }
    case Predicate::Kind::And: return reference_eval(p.children[0], v) && reference_eval(p.children[1], v);
    case Predicate::Kind::Or: return reference_eval(p.children[0], v) || reference_eval(p.children[1], v);
    }
    return false;
}

TEST_F(CredentialTest, EncodedEvaluationMatchesReferenceOnRandomIntegers) {
    const char* ops[] = {"<", "<=", "==", "!=", ">=", ">"};
    for (int i = 0; i < 2000; ++i) {
        std::int64_t v = static_cast<std::int64_t>(rng() % 2001) - 1000;
        if (i % 10 == 0) v = static_cast<std::int64_t>(rng() >> 2) * ((rng() & 1) ? 1 : -1); // large magnitudes
        std::int64_t c1 = static_cast<std::int64_t>(rng() % 2001) - 1000, c2 = static_cast<std::int64_t>(rng() % 2001) - 1000;
        std::string text = "x " + std::string(ops[rng() % 6]) + " " + std::to_string(c1);
        if (rng() % 2) text += std::string(rng() % 2 ? " and " : " or ") + "x " + ops[rng() % 6] + " " + std::to_string(c2);
        auto claim = make_claim(d, enums, "x", int_value(v));
        ASSERT_EQ(holds(text, claim), reference_eval(parse_predicate(text), claim.value)) << text << " v=" << v;
    }
}

TEST_F(CredentialTest, EncodedEvaluationMatchesReferenceOnEnums) {
    std::vector<std::string> labels{"A", "B", "C", "D", "E", "F"};
    for (int i = 0; i < 500; ++i) {
        std::string set = "{";
        std::size_t n = 1 + rng() % 4;
        for (std::size_t k = 0; k < n; ++k) set += (k ? "," : "") + labels[rng() % 6];
        set += "}";
        std::string text = std::string("g ") + (rng() % 2 ? "in " : "notin ") + set;
        auto claim = make_claim(d, enums, "g", enum_value("grade", labels[rng() % 6]));
        ASSERT_EQ(holds(text, claim), reference_eval(parse_predicate(text), claim.value)) << text;
    }
}

TEST_F(CredentialTest, ParserRejectsMalformedPredicates) {
    for (const char* bad : {"", "age", "age >=", ">= 18", "age >= 18 and", "age in {}", "age in {1", "(age > 1",
                            "age > 1 and height < 2", "age ! 3", "age >= 18 18"}) {
        EXPECT_EQ(code_of([&] { parse_predicate(bad); }), ErrorCode::InvalidInput) << bad;
    }
}

TEST_F(CredentialTest, BindingRejectsIllTypedPredicates) {
    ClaimSchema grade{ClaimKind::Enum, "grade"};
    EXPECT_EQ(code_of([&] { bind_predicate(d, enums, parse_predicate("g >= B"), grade); }), ErrorCode::InvalidInput);
    EXPECT_EQ(code_of([&] { bind_predicate(d, enums, parse_predicate("g == Z"), grade); }), ErrorCode::EncodingError);
    EXPECT_EQ(code_of([&] { bind_predicate(d, enums, parse_predicate("age > ten"), ClaimSchema{}); }), ErrorCode::EncodingError);
}

TEST_F(CredentialTest, EvaluationIsTotalOverMalformedEncodings) {
    auto claim = make_claim(d, enums, "age", int_value(30));
    EncodedClaim ec{claim.key_digest, claim.kind_code, claim.encoded};
    auto bound = bind_predicate(d, enums, parse_predicate("age >= 18"), ClaimSchema{});
    ASSERT_TRUE(evaluate_predicate(d, bound.encoding, ec));
    for (std::size_t cut = 0; cut < bound.encoding.size(); ++cut) {
        FieldVector truncated(bound.encoding.begin(), bound.encoding.begin() + static_cast<long>(cut));
        EXPECT_FALSE(evaluate_predicate(d, truncated, ec));
    }
    auto extended = bound.encoding;
    extended.push_back(f.one());
    EXPECT_FALSE(evaluate_predicate(d, extended, ec));
    for (int i = 0; i < 200; ++i) {
        FieldVector junk = bound.encoding;
        junk[2 + rng() % (junk.size() - 2)] = f.random(rng);
        evaluate_predicate(d, junk, ec); // must not throw
    }
    auto other_key = make_claim(d, enums, "weight", int_value(30));
    EXPECT_FALSE(evaluate_predicate(d, bound.encoding, EncodedClaim{other_key.key_digest, other_key.kind_code, other_key.encoded}));
}

TEST_F(CredentialTest, PredicateTextRoundTrips) {
    for (const char* text : {"age >= 18", "grade in {A,B,C}", "blood notin {AB}", "(age > 1 and age < 9)"}) {
        auto p = parse_predicate(text);
        EXPECT_EQ(predicate_to_text(parse_predicate(predicate_to_text(p))), predicate_to_text(p));
    }
}

} // namespace
