#include "world.hpp"

#include <gtest/gtest.h>

using namespace sybilid;
using namespace sybilid::testing;

namespace {

struct Campaigns : ::testing::Test {
    World w{shallow_deployment(), 9};
    Campaign campaign = Campaign::open(*w.d, w.issuer.id, w.rng);
    VerifierContext ctx = w.challenge();

    CampaignSubmission submit(const Holder& h, std::size_t member, const Credential& cred, const Campaign& c) {
        const auto& m = h.members[member];
        auto p = present(w.nizk, w.enums, cred, parse_predicate("age >= 18"), m.sk, ctx, w.vdr, w.ledger, w.rng);
        CampaignSubmission s;
        s.bundle = p.bundle;
        s.uniqueness = prove_campaign_uniqueness(w.nizk, cred, m.sk, p.u_c, w.vdr, c);
        s.association = prove_identifier_presentation(w.nizk, w.vdr, h.association, m.id, c.id());
        return s;
    }

    void admit(Campaign& c, const CampaignSubmission& s) { c.admit(w.nizk, s, w.vdr, w.ledger, w.policy("age >= 18", ctx)); }
};

} // namespace

TEST_F(Campaigns, NullifiersMatchIndependentRecompute) {
    auto h = w.onboard(2);
    auto cred = w.issue(h.members[0].id);
    auto s = submit(h, 0, cred, campaign);
    admit(campaign, s);
    const auto& hs = w.d->hasher();
    auto n_s = hs.h1({cred.digest(*w.d), h.members[0].sk, campaign.id()}, Site::CampaignCred);
    FieldVector in = h.association.ids;
    in.push_back(campaign.id());
    auto n_a_eps = hs.h1(in, Site::CampaignAssoc);
    EXPECT_EQ(campaign.credential_nullifiers(), std::set<FieldElement>{n_s});
    EXPECT_EQ(campaign.association_nullifiers(), std::set<FieldElement>{n_a_eps});
}

TEST_F(Campaigns, OneAdmissionPerAssociatedIdentifier) {
    auto h = w.onboard(3);
    auto c0 = w.issue(h.members[0].id);
    auto c1 = w.issue(h.members[1].id);
    admit(campaign, submit(h, 0, c0, campaign));
    auto state = campaign.state_digest(w.d->hasher());
    EXPECT_EQ(code_of([&] { admit(campaign, submit(h, 0, c0, campaign)); }), ErrorCode::DuplicateNullifier);
    // Another identifier and another credential of the same holder still collide on n_a,eps.
    EXPECT_EQ(code_of([&] { admit(campaign, submit(h, 1, c1, campaign)); }), ErrorCode::DuplicateNullifier);
    EXPECT_EQ(campaign.state_digest(w.d->hasher()), state);

    auto other = w.onboard(1);
    admit(campaign, submit(other, 0, w.issue(other.members[0].id), campaign));
    EXPECT_EQ(campaign.association_nullifiers().size(), 2u);
}

TEST_F(Campaigns, SameCredentialIsFreshInAnotherCampaign) {
    auto h = w.onboard(1);
    auto cred = w.issue(h.members[0].id);
    admit(campaign, submit(h, 0, cred, campaign));
    auto second = Campaign::open(*w.d, w.issuer.id, w.rng);
    admit(second, submit(h, 0, cred, second));
    std::set<FieldElement> all = campaign.credential_nullifiers();
    all.insert(second.credential_nullifiers().begin(), second.credential_nullifiers().end());
    EXPECT_EQ(all.size(), 2u);
}

TEST_F(Campaigns, AdmissionIsAllOrNothing) {
    auto h = w.onboard(1);
    auto cred = w.issue(h.members[0].id);
    auto s = submit(h, 0, cred, campaign);
    campaign.check_association(w.nizk, *s.association, w.vdr);
    auto state = campaign.state_digest(w.d->hasher());
    EXPECT_EQ(code_of([&] { admit(campaign, s); }), ErrorCode::DuplicateNullifier);
    EXPECT_EQ(campaign.state_digest(w.d->hasher()), state);
    EXPECT_TRUE(campaign.credential_nullifiers().empty());
}

TEST_F(Campaigns, PartsMustDescribeTheSameHolder) {
    auto a = w.onboard(1);
    auto b = w.onboard(1);
    auto ca = w.issue(a.members[0].id);
    auto cb = w.issue(b.members[0].id);
    auto sa = submit(a, 0, ca, campaign);
    auto sb = submit(b, 0, cb, campaign);
    auto mixed = sa;
    mixed.association = sb.association;
    auto state = campaign.state_digest(w.d->hasher());
    EXPECT_EQ(code_of([&] { admit(campaign, mixed); }), ErrorCode::UnsatisfiedRelation);
    mixed = sa;
    mixed.uniqueness = sb.uniqueness;
    EXPECT_EQ(code_of([&] { admit(campaign, mixed); }), ErrorCode::UnsatisfiedRelation);
    EXPECT_EQ(campaign.state_digest(w.d->hasher()), state);
}

TEST_F(Campaigns, SubmissionShapes) {
    auto h = w.onboard(1);
    auto cred = w.issue(h.members[0].id);
    auto s = submit(h, 0, cred, campaign);
    EXPECT_EQ(code_of([&] { admit(campaign, CampaignSubmission{}); }), ErrorCode::InvalidInput);
    auto no_uniqueness = s;
    no_uniqueness.uniqueness.reset();
    EXPECT_EQ(code_of([&] { admit(campaign, no_uniqueness); }), ErrorCode::InvalidInput);
    auto only_assoc = s;
    only_assoc.bundle.reset();
    only_assoc.uniqueness.reset();
    EXPECT_NO_THROW(admit(campaign, only_assoc));
}

TEST_F(Campaigns, WrongCampaignOrVerifier) {
    auto h = w.onboard(1);
    auto cred = w.issue(h.members[0].id);
    auto elsewhere = Campaign::open(*w.d, w.issuer.id, w.rng);
    auto s = submit(h, 0, cred, elsewhere);
    EXPECT_EQ(code_of([&] { admit(campaign, s); }), ErrorCode::UnsatisfiedRelation);

    Identity stranger{w.f().random(w.rng), keygen(*w.d, w.rng)};
    w.vdr.publish_identifier(stranger.id, stranger.keys.pk);
    IssuerLedger their(w.d, stranger.id);
    auto foreign = w.issue(h.members[0].id, 30, &their, &stranger);
    EXPECT_EQ(code_of([&] { prove_campaign_uniqueness(w.nizk, foreign, h.members[0].sk, w.f().random(w.rng), w.vdr, campaign); }),
              ErrorCode::UnsatisfiedRelation);
}

TEST_F(Campaigns, BlockedOrSupersededAssociations) {
    auto h = w.onboard(1);
    auto cred = w.issue(h.members[0].id);
    auto s = submit(h, 0, cred, campaign);
    auto extra = w.publish_and_register();
    w.vdr.append_identifier(w.nizk, prove_append(w.nizk, w.vdr, h.association, extra, w.rng).proof);
    EXPECT_EQ(code_of([&] { admit(campaign, s); }), ErrorCode::StaleAssociation);

    auto g = w.onboard(1);
    auto s2 = submit(g, 0, w.issue(g.members[0].id), campaign);
    w.vdr.block_associated_identifier(g.association.n_a(*w.d), "fraud", true);
    EXPECT_EQ(code_of([&] { admit(campaign, s2); }), ErrorCode::Blocked);
    EXPECT_TRUE(campaign.credential_nullifiers().empty());
}

TEST_F(Campaigns, IdentifierOutsideAssociationCannotPresent) {
    auto h = w.onboard(1);
    auto outsider = w.publish_and_register();
    EXPECT_EQ(code_of([&] { prove_identifier_presentation(w.nizk, w.vdr, h.association, outsider.id, campaign.id()); }),
              ErrorCode::UnsatisfiedRelation);
    auto never = w.publish_and_register();
    AssociationSecret fake{{never.id}, w.f().random(w.rng)};
    EXPECT_EQ(code_of([&] { prove_identifier_presentation(w.nizk, w.vdr, fake, never.id, campaign.id()); }),
              ErrorCode::UnsatisfiedRelation);
}
