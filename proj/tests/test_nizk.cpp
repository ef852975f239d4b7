#include "instances.hpp"

#include "sybilid/errors.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace sybilid;
using namespace sybilid::testing;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const ProtocolError& e) {
        return e.code();
    }
    return ErrorCode::Ok;
}

struct Fixture : ::testing::Test {
    DeploymentPtr d = shallow_deployment();
    Nizk nizk{d};
    InstanceGenerator gen{d, 11};
};

} // namespace

TEST_F(Fixture, SetupKnowsEveryProtocolRelation) {
    auto labels = nizk.registry().labels();
    EXPECT_EQ(labels.size(), 15u);
    for (const auto& l : labels) {
        auto crs = nizk.setup(l);
        EXPECT_EQ(crs.relation, l);
        EXPECT_EQ(crs.version, 1);
    }
    EXPECT_EQ(code_of([&] { nizk.setup("REL_NOT_A_RELATION"); }), ErrorCode::UnknownRelation);
}

TEST_F(Fixture, RoundTripAndPayloadShape) {
    auto in = gen.make(rel::IdRegister);
    auto crs = nizk.setup(in.relation);
    auto proof = nizk.prove(crs, in.statement, in.witness);
    EXPECT_EQ(proof.backend, "direct-check");
    EXPECT_EQ(proof.relation, in.relation);
    EXPECT_EQ(proof.statement, in.statement);
    EXPECT_TRUE(nizk.verify(crs, proof));
    EXPECT_TRUE(nizk.verify(crs, in.statement, proof));
    std::string raw = base64_decode(proof.payload);
    EXPECT_EQ(raw.rfind("v1\n", 0), 0u);
}

TEST_F(Fixture, CrsForAnotherRelationIsAMismatch) {
    auto in = gen.make(rel::IdRegister);
    auto proof = nizk.prove(nizk.setup(in.relation), in.statement, in.witness);
    EXPECT_EQ(code_of([&] { nizk.verify(nizk.setup(rel::HolderId), proof); }), ErrorCode::RelationMismatch);
    EXPECT_EQ(code_of([&] { nizk.prove(nizk.setup(rel::HolderId), in.statement, in.witness); }), ErrorCode::SchemaError);
}

TEST_F(Fixture, SchemaViolationsAtProveTime) {
    auto in = gen.make(rel::IdRegister);
    auto crs = nizk.setup(in.relation);
    auto missing = in.witness;
    missing.erase("sk");
    EXPECT_EQ(code_of([&] { nizk.prove(crs, in.statement, missing); }), ErrorCode::SchemaError);
    auto extra = in.statement;
    extra["surplus"] = {gen.rnd()};
    EXPECT_EQ(code_of([&] { nizk.prove(crs, extra, in.witness); }), ErrorCode::SchemaError);
    auto wide = in.statement;
    wide["h_id"].push_back(gen.rnd());
    EXPECT_EQ(code_of([&] { nizk.prove(crs, wide, in.witness); }), ErrorCode::SchemaError);
    auto short_path = in.witness;
    short_path["rho_id"].pop_back();
    EXPECT_EQ(code_of([&] { nizk.prove(crs, in.statement, short_path); }), ErrorCode::SchemaError);
}

TEST_F(Fixture, VerifierSlotsAreNeverProverInput) {
    auto in = gen.make(rel::VerifierKey);
    auto crs = nizk.setup(in.relation);
    EXPECT_EQ(code_of([&] { nizk.prove(crs, in.statement, in.verifier); }), ErrorCode::SchemaError);
    auto proof = nizk.prove(crs, in.statement, {});
    EXPECT_TRUE(nizk.verify(crs, proof, in.verifier));
    EXPECT_FALSE(nizk.verify(crs, proof, {{"sk_V", {gen.rnd_sk()}}}));
    EXPECT_FALSE(nizk.verify(crs, proof));
}

TEST_F(Fixture, UnsatisfiedNamesTheClause) {
    auto in = gen.make(rel::IdRegister);
    in.witness["sk"] = {gen.rnd_sk()};
    try {
        nizk.prove(nizk.setup(in.relation), in.statement, in.witness);
        FAIL() << "prove accepted a false statement";
    } catch (const ProtocolError& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnsatisfiedRelation);
        EXPECT_NE(std::string(e.what()).find("clause '"), std::string::npos) << e.what();
    }
    auto report = nizk.check(in.relation, in.statement, in.witness, {}, false);
    EXPECT_FALSE(report.satisfied);
    EXPECT_FALSE(report.failed_clause.empty());
}

TEST_F(Fixture, MalformedPayloadsReject) {
    auto in = gen.make(rel::IdRegister);
    auto crs = nizk.setup(in.relation);
    auto proof = nizk.prove(crs, in.statement, in.witness);
    std::string raw = base64_decode(proof.payload);
    for (std::size_t cut : {std::size_t{0}, std::size_t{3}, raw.size() / 2, raw.size() - 1}) {
        Proof p = proof;
        p.payload = base64_encode(raw.substr(0, cut));
        EXPECT_FALSE(nizk.verify(crs, p)) << "cut at " << cut;
    }
    Proof p = proof;
    p.payload = "###not-base64###";
    EXPECT_FALSE(nizk.verify(crs, p));
    p.payload = proof.payload.substr(0, proof.payload.size() - 4);
    EXPECT_FALSE(nizk.verify(crs, p));
    p = proof;
    p.backend = "groth16";
    EXPECT_FALSE(nizk.verify(crs, p));
}

// Every proof is bound to its statement: replacing any one public element rejects.
TEST_F(Fixture, SingleSlotMutationsReject) {
    std::vector<std::string> labels = nizk.registry().labels();
    labels.erase(std::remove(labels.begin(), labels.end(), rel::KeyRefresh), labels.end());
    std::size_t trials = 0;
    for (std::size_t i = 0; trials < 1000; ++i) {
        auto in = gen.make(labels[i % labels.size()]);
        auto crs = nizk.setup(in.relation);
        auto proof = nizk.prove(crs, in.statement, in.witness);
        for (int k = 0; k < 5 && trials < 1000; ++k, ++trials) {
            Proof bad = proof;
            auto it = bad.statement.begin();
            std::advance(it, gen.rng()() % bad.statement.size());
            auto& slot = it->second;
            slot[gen.rng()() % slot.size()] = gen.rnd();
            EXPECT_FALSE(nizk.verify(crs, bad, in.verifier)) << in.relation << "." << it->first;
            EXPECT_FALSE(nizk.verify(crs, bad.statement, proof, in.verifier)) << in.relation << "." << it->first;
        }
    }
    EXPECT_EQ(trials, 1000u);
}

TEST_F(Fixture, StatementDigestSeparatesSlotNames) {
    SlotMap a{{"x", {gen.one()}}};
    SlotMap b{{"y", {gen.one()}}};
    EXPECT_NE(nizk.statement_digest(rel::IdRegister, a), nizk.statement_digest(rel::IdRegister, b));
    EXPECT_NE(nizk.statement_digest(rel::IdRegister, a), nizk.statement_digest(rel::HolderId, a));
    SlotMap c{{"x", {gen.one(), gen.one()}}};
    SlotMap e{{"x", {gen.one()}}, {"z", {gen.one()}}};
    EXPECT_NE(nizk.statement_digest(rel::IdRegister, c), nizk.statement_digest(rel::IdRegister, e));
}

TEST_F(Fixture, JsonRoundTrip) {
    auto in = gen.make(rel::SelectiveDisclosure);
    auto crs = nizk.setup(in.relation);
    auto proof = nizk.prove(crs, in.statement, in.witness);
    std::string text = proof_to_json(*d, proof);
    Proof back = proof_from_json(*d, text);
    EXPECT_EQ(back.relation, proof.relation);
    EXPECT_EQ(back.statement, proof.statement);
    EXPECT_EQ(back.payload, proof.payload);
    EXPECT_EQ(proof_to_json(*d, back), text);
    EXPECT_TRUE(nizk.verify(crs, back, in.verifier));
    EXPECT_EQ(code_of([&] { proof_from_json(*d, "{\"relation\": 3}"); }), ErrorCode::EncodingError);
    EXPECT_EQ(code_of([&] { proof_from_json(*d, "not json"); }), ErrorCode::EncodingError);
}

TEST(Base64, MatchesKnownVectors) {
    // RFC 4648 test vectors.
    const std::pair<const char*, const char*> vectors[] = {
        {"", ""}, {"f", "Zg=="}, {"fo", "Zm8="}, {"foo", "Zm9v"}, {"foob", "Zm9vYg=="}, {"fooba", "Zm9vYmE="}, {"foobar", "Zm9vYmFy"}};
    for (auto [plain, enc] : vectors) {
        EXPECT_EQ(base64_encode(plain), enc);
        EXPECT_EQ(base64_decode(enc), plain);
    }
    EXPECT_EQ(code_of([] { base64_decode("Zm9"); }), ErrorCode::EncodingError);
}

TEST(CustomRegistry, RejectsDuplicatesAndRunsCustomClauses) {
    RelationRegistry reg;
    RelationDescriptor r;
    r.label = "REL_SQUARE";
    r.statement = {{"y"}};
    r.witness = {{"x"}};
    r.clauses = {{"square", false, [](const ClauseContext& c) {
                      const auto& f = c.deployment().field();
                      return f.mul(c.one("x"), c.one("x")) == c.one("y");
                  }}};
    reg.add(r);
    EXPECT_EQ(code_of([&] { reg.add(r); }), ErrorCode::Conflict);
    auto d = shallow_deployment();
    Nizk nizk(d, reg);
    const auto& f = d->field();
    auto x = f.from_u64(7);
    auto proof = nizk.prove(nizk.setup("REL_SQUARE"), {{"y", {f.mul(x, x)}}}, {{"x", {x}}});
    EXPECT_TRUE(nizk.verify(nizk.setup("REL_SQUARE"), proof));
    EXPECT_EQ(code_of([&] { nizk.prove(nizk.setup("REL_SQUARE"), {{"y", {x}}}, {{"x", {x}}}); }),
              ErrorCode::UnsatisfiedRelation);
}
