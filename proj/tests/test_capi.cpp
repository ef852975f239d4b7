#include "sybilid.h"

#include <gtest/gtest.h>

#include <string>

namespace {

struct Owned {
    char* p = nullptr;
    ~Owned() { sid_string_free(p); }
};

const char* kScript = "seed 3\nconfig depth=8 window=8\nkeygen a a.id\npublish a.id\npublish a.id expect=Conflict\n";

} // namespace

TEST(CApi, StatusNamesMatchCodes) {
    EXPECT_STREQ(sid_status_name(SID_OK), "Ok");
    EXPECT_STREQ(sid_status_name(SID_DUPLICATE_NULLIFIER), "DuplicateNullifier");
    EXPECT_STREQ(sid_status_name(SID_IO_ERROR), "IoError");
    EXPECT_STRNE(sid_version(), "");
}

TEST(CApi, RunAccessorsAndLog) {
    sid_run* run = nullptr;
    ASSERT_EQ(sid_run_script(kScript, nullptr, &run), SID_OK) << sid_last_error();
    EXPECT_EQ(sid_run_seed(run), 3u);
    EXPECT_EQ(sid_run_passed(run), 1);
    ASSERT_EQ(sid_run_action_count(run), 3u);
    sid_action_info a{};
    ASSERT_EQ(sid_run_action(run, 2, &a), SID_OK);
    EXPECT_EQ(a.seq, 3u);
    EXPECT_STREQ(a.outcome, "Conflict");
    EXPECT_STREQ(a.expected, "Conflict");
    EXPECT_EQ(sid_run_action(run, 3, &a), SID_NOT_FOUND);
    EXPECT_NE(std::string(sid_last_error()).find("out of range"), std::string::npos);

    std::string log = sid_run_log(run);
    sid_replay_result r{};
    ASSERT_EQ(sid_replay(log.c_str(), &r), SID_OK);
    EXPECT_EQ(r.verdict, SID_CONSISTENT);
    EXPECT_EQ(r.records, 3u);

    Owned inspect, stats;
    uint64_t at = 2;
    ASSERT_EQ(sid_log_inspect(log.c_str(), &at, &inspect.p), SID_OK);
    EXPECT_NE(std::string(inspect.p).find("\"publish\""), std::string::npos);
    ASSERT_EQ(sid_log_stats(log.c_str(), &stats.p), SID_OK);
    EXPECT_NE(std::string(stats.p).find("\"identity_leaves\": 1"), std::string::npos);
    sid_run_free(run);
}

TEST(CApi, ExplicitSeedAndDivergence) {
    sid_run* run = nullptr;
    uint64_t seed = 99;
    ASSERT_EQ(sid_run_script("keygen a a.id\npublish a.id expect=Revoked\n", &seed, &run), SID_OK);
    EXPECT_EQ(sid_run_seed(run), 99u);
    uint64_t seq = 0;
    EXPECT_EQ(sid_run_divergence(run, &seq), 1);
    EXPECT_EQ(seq, 2u);
    EXPECT_EQ(sid_run_passed(run), 0);
    sid_run_free(run);
}

TEST(CApi, ErrorsComeBackAsStatus) {
    sid_run* run = nullptr;
    EXPECT_EQ(sid_run_script("dance\n", nullptr, &run), SID_SCRIPT_ERROR);
    EXPECT_EQ(run, nullptr);
    EXPECT_NE(std::string(sid_last_error()).find("line 1"), std::string::npos);
    EXPECT_EQ(sid_run_script(nullptr, nullptr, &run), SID_INVALID_INPUT);
    EXPECT_EQ(sid_run_script_file("/nonexistent/file.scn", nullptr, &run), SID_IO_ERROR);
    sid_replay_result r{};
    EXPECT_EQ(sid_replay("garbage\n", &r), SID_LOG_ERROR);
    Owned out;
    EXPECT_EQ(sid_credential_show("{}", &out.p), SID_INVALID_INPUT);
    sid_run_free(nullptr);
}

TEST(CApi, KeygenIsDeterministicUnderSeed) {
    Owned a, b, c;
    uint64_t s1 = 5, s2 = 6;
    ASSERT_EQ(sid_keygen(&s1, &a.p), SID_OK);
    ASSERT_EQ(sid_keygen(&s1, &b.p), SID_OK);
    ASSERT_EQ(sid_keygen(&s2, &c.p), SID_OK);
    EXPECT_STREQ(a.p, b.p);
    EXPECT_STRNE(a.p, c.p);
}

TEST(CApi, CredentialsRoundTripThroughShow) {
    sid_run* run = nullptr;
    ASSERT_EQ(sid_run_script_file(SYBILID_SCENARIO_DIR "/happy_path.scn", nullptr, &run), SID_OK) << sid_last_error();
    ASSERT_EQ(sid_run_credential_count(run), 3u);
    const char* name = nullptr;
    const char* text = nullptr;
    ASSERT_EQ(sid_run_credential(run, 1, &name, &text), SID_OK);
    EXPECT_STREQ(name, "passport");
    Owned shown;
    ASSERT_EQ(sid_credential_show(text, &shown.p), SID_OK) << sid_last_error();
    std::string s = shown.p;
    EXPECT_NE(s.find("\"age\""), std::string::npos);
    EXPECT_NE(s.find("\"digest\""), std::string::npos);
    sid_run_free(run);
}
