#include "sybilid/errors.hpp"
#include "sybilid/harness.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace sybilid;
using namespace sybilid::harness;
using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> scenario_files() {
    std::vector<std::string> out;
    for (const auto& e : std::filesystem::directory_iterator(SYBILID_SCENARIO_DIR)) {
        if (e.path().extension() == ".scn") out.push_back(e.path().filename().string());
    }
    std::sort(out.begin(), out.end());
    return out;
}

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const ProtocolError& e) {
        return e.code();
    }
    return ErrorCode::Ok;
}

std::vector<std::string> lines_of(const std::string& log) {
    std::vector<std::string> out;
    std::stringstream ss(log);
    std::string l;
    while (std::getline(ss, l)) out.push_back(l);
    return out;
}

std::string join(const std::vector<std::string>& lines) {
    std::string out;
    for (const auto& l : lines) out += l + "\n";
    return out;
}

const char* kSmall = R"(
seed 4
config depth=8 window=8
keygen iss iss.id
publish iss.id
keygen v v.id
publish v.id
keygen h h.1
keygen h h.2
publish h.1
publish h.2
register h.1
register h.2
associate h h.1,h.2
issue iss.id c holder=h.1 age:int=30
present p cred=c verifier=v.id predicate="age >= 18"
open-campaign camp verifier=iss.id
present-campaign camp holder=h ident=h.1 cred=c predicate="age > 1"
present-campaign camp holder=h ident=h.2 expect=DuplicateNullifier
)";

} // namespace

TEST(ScriptParser, ReadsActionsOptionsAndExpectations) {
    auto s = parse_script("seed 9\nconfig depth=8 window=3 randomized=no guard=key\n"
                          "issue a c holder=b age:int=3 \"name:string=x y\" # trailing comment\n"
                          "present p cred=c verifier=v predicate=\"age >= 2\" expect=Revoked\n");
    ASSERT_TRUE(s.seed);
    EXPECT_EQ(*s.seed, 9u);
    EXPECT_EQ(s.deployment.protocol.tree_depth, 8);
    EXPECT_EQ(s.deployment.protocol.root_window, 3u);
    EXPECT_FALSE(s.deployment.protocol.randomized_association);
    EXPECT_EQ(s.deployment.protocol.default_guard, ForwardingGuard::VerifierKey);
    ASSERT_EQ(s.actions.size(), 2u);
    EXPECT_EQ(s.actions[0].args, (std::vector<std::string>{"a", "c", "age:int=3", "name:string=x y"}));
    EXPECT_EQ(s.actions[0].options.at("holder"), "b");
    EXPECT_EQ(s.actions[0].expect, "ok");
    EXPECT_EQ(s.actions[1].options.at("predicate"), "age >= 2");
    EXPECT_EQ(s.actions[1].expect, "Revoked");
    EXPECT_EQ(s.actions[1].line, 4u);
}

TEST(ScriptParser, RejectsMalformedScripts) {
    for (const char* bad : {"fly away\n", "present p predicate=\"age\n", "keygen a b expect=Nope\n",
                            "keygen a b\nconfig depth=4\n", "keygen a b x=1 x=2\n", "config colour=red\n",
                            "seed many\n", "config randomized=perhaps\n", "keygen a b expect=Ok\n"}) {
        EXPECT_EQ(code_of([&] { parse_script(bad); }), ErrorCode::ScriptError) << bad;
    }
}

TEST(ScriptParser, SeedPrecedence) {
    auto with = parse_script("seed 5\n");
    auto without = parse_script("snapshot\n");
    EXPECT_EQ(resolve_seed(with, 9), 9u);
    EXPECT_EQ(resolve_seed(with, std::nullopt), 5u);
    ::setenv("SYBILID_SEED", "42", 1);
    EXPECT_EQ(resolve_seed(without, std::nullopt), 42u);
    EXPECT_EQ(resolve_seed(with, std::nullopt), 5u);
    ::setenv("SYBILID_SEED", "x", 1);
    EXPECT_EQ(code_of([&] { resolve_seed(without, std::nullopt); }), ErrorCode::InvalidInput);
    ::unsetenv("SYBILID_SEED");
    EXPECT_EQ(resolve_seed(without, std::nullopt), 1u);
}

TEST(Runner, UnresolvedReferenceIsAScriptError) {
    EXPECT_EQ(code_of([] { run_scenario(parse_script("publish nobody\n"), 1); }), ErrorCode::ScriptError);
    EXPECT_EQ(code_of([] { run_scenario(parse_script("keygen a x\nkeygen a x\n"), 1); }), ErrorCode::ScriptError);
    EXPECT_EQ(code_of([] { run_scenario(parse_script("submit nothing\n"), 1); }), ErrorCode::ScriptError);
}

TEST(Runner, StopsAtFirstDivergence) {
    auto r = run_scenario(parse_script("keygen a a.id\npublish a.id expect=Conflict\npublish a.id\n"), 1);
    ASSERT_TRUE(r.divergence);
    EXPECT_EQ(*r.divergence, 2u);
    EXPECT_EQ(r.actions.size(), 2u);
    EXPECT_EQ(r.actions[1].outcome, "ok");
    EXPECT_FALSE(r.passed());
    auto footer = json::parse(lines_of(r.log).back());
    EXPECT_EQ(footer.at("divergence").get<int>(), 2);
}

TEST(Runner, SmallScenarioOutcomes) {
    auto r = run_scenario(parse_script(kSmall), 4);
    ASSERT_TRUE(r.passed()) << r.actions.back().text << " -> " << r.actions.back().detail;
    EXPECT_EQ(r.actions.back().outcome, "DuplicateNullifier");
}

TEST(Runner, DeterministicUnderSeed) {
    auto s = parse_script(kSmall);
    auto a = run_scenario(s, 4), b = run_scenario(s, 4), c = run_scenario(s, 5);
    EXPECT_EQ(a.log, b.log);
    EXPECT_EQ(a.final_digest, b.final_digest);
    EXPECT_NE(a.log, c.log);
}

TEST(Runner, RejectionsLeaveStateUntouched) {
    auto r = run_scenario(parse_script(kSmall), 4);
    auto lines = lines_of(r.log);
    for (std::size_t i = 1; i + 1 < lines.size(); ++i) {
        auto rec = json::parse(lines[i]);
        if (rec.at("outcome") != "ok") {
            EXPECT_EQ(rec.at("before"), rec.at("after")) << rec.at("line");
        }
    }
}

TEST(Runner, RecordsChainTogether) {
    auto lines = lines_of(run_scenario(parse_script(kSmall), 4).log);
    auto header = json::parse(lines[0]);
    EXPECT_EQ(header.at("format"), "sybilid-ledger-log");
    EXPECT_EQ(header.at("depth"), 8);
    EXPECT_EQ(header.at("window"), 8);
    EXPECT_EQ(header.at("seed"), 4);
    std::set<std::string> chains;
    for (std::size_t i = 1; i + 1 < lines.size(); ++i) {
        auto rec = json::parse(lines[i]);
        EXPECT_EQ(rec.at("seq").get<std::size_t>(), i);
        chains.insert(rec.at("chain").get<std::string>());
        if (i > 1) EXPECT_EQ(rec.at("before"), json::parse(lines[i - 1]).at("after"));
    }
    EXPECT_EQ(chains.size(), lines.size() - 2);
}

TEST(Replay, UntouchedLogIsConsistent) {
    auto log = run_scenario(parse_script(kSmall), 4).log;
    auto v = replay_log(log);
    EXPECT_EQ(v.kind, ReplayVerdict::Kind::Consistent);
    EXPECT_EQ(v.records, 16u);
}

TEST(Replay, FlippedTranscriptByteIsFoundAtItsSequence) {
    auto lines = lines_of(run_scenario(parse_script(kSmall), 4).log);
    for (std::size_t seq : {std::size_t{2}, std::size_t{11}, std::size_t{15}}) {
        auto tampered = lines;
        auto& l = tampered[seq];
        auto pos = l.find("\"transcript\":{\"");
        ASSERT_NE(pos, std::string::npos) << seq;
        pos = l.find_first_of("0123456789abcdef", l.find(':', pos + 15) + 1);
        l[pos] = l[pos] == '0' ? '1' : '0';
        auto v = replay_log(join(tampered));
        EXPECT_EQ(v.kind, ReplayVerdict::Kind::Inconsistent);
        ASSERT_TRUE(v.divergent_seq);
        EXPECT_EQ(*v.divergent_seq, seq);
        EXPECT_EQ(v.records, seq - 1);
    }
}

TEST(Replay, TruncatedLogGivesConsistentPrefix) {
    auto lines = lines_of(run_scenario(parse_script(kSmall), 4).log);
    std::vector<std::string> head(lines.begin(), lines.begin() + 8);
    auto v = replay_log(join(head));
    EXPECT_EQ(v.kind, ReplayVerdict::Kind::Truncated);
    EXPECT_EQ(v.records, 7u);
    std::string partial = join(head) + lines[8].substr(0, 20);
    v = replay_log(partial);
    EXPECT_EQ(v.kind, ReplayVerdict::Kind::Truncated);
    EXPECT_EQ(v.records, 7u);
}

TEST(Replay, CorruptHeaderIsALogError) {
    auto lines = lines_of(run_scenario(parse_script(kSmall), 4).log);
    auto bad = lines;
    bad[0] = "{\"format\":\"something-else\",\"version\":1}";
    EXPECT_EQ(code_of([&] { replay_log(join(bad)); }), ErrorCode::LogError);
    bad[0] = lines[0].substr(0, 30);
    EXPECT_EQ(code_of([&] { replay_log(join(bad)); }), ErrorCode::LogError);
    EXPECT_EQ(code_of([&] { replay_log(""); }), ErrorCode::LogError);
}

TEST(Inspect, ShowsHeaderAndRecords) {
    auto log = run_scenario(parse_script(kSmall), 4).log;
    auto all = json::parse(inspect_log(log, std::nullopt));
    EXPECT_EQ(all.at("records"), 16);
    EXPECT_TRUE(all.at("complete").get<bool>());
    EXPECT_EQ(all.at("summary").size(), 16u);
    auto one = json::parse(inspect_log(log, 11));
    EXPECT_EQ(one.at("record").at("verb"), "associate");
    EXPECT_EQ(code_of([&] { inspect_log(log, 99); }), ErrorCode::NotFound);
}

// Recount from the log itself: every accepted action's effect on the registry is known.
TEST(Stats, MatchDirectRecountFromLog) {
    for (const auto& file : scenario_files()) {
        auto script = parse_script(read_file(std::filesystem::path(SYBILID_SCENARIO_DIR) / file));
        auto r = run_scenario(script, resolve_seed(script, std::nullopt));
        RegistryStats expect;
        auto lines = lines_of(r.log);
        std::map<std::string, std::string> stored;
        for (std::size_t i = 1; i + 1 < lines.size(); ++i) {
            auto rec = json::parse(lines[i]);
            if (rec.at("outcome") != "ok") continue;
            std::string verb = rec.at("verb");
            auto action = parse_script(rec.at("line").get<std::string>()).actions.at(0);
            if (action.options.count("as")) stored[action.options.at("as")] = verb;
            if (action.options.count("hold") && action.options.at("hold") == "yes") continue;
            if (verb == "submit") verb = stored.at(action.args.at(0));
            if (verb == "publish") {
                ++expect.identity_leaves;
                ++expect.identity_records;
            } else if (verb == "register") {
                ++expect.registration_leaves;
            } else if (verb == "associate") {
                ++expect.association_leaves;
                auto stmt = rec.at("transcript").at("proof").at("statement");
                expect.registration_nullifiers += stmt.at("n_reg").size();
            } else if (verb == "append" || verb == "aggregate" || verb == "refresh-randomness") {
                ++expect.association_leaves;
                expect.association_nullifiers += verb == "aggregate" ? 2 : 1;
                if (verb == "append") ++expect.registration_nullifiers;
            } else if (verb == "refresh-key") {
                ++expect.identity_leaves;
                ++expect.registration_nullifiers;
                ++expect.key_refreshes;
            } else if (verb == "block") {
                ++expect.blocked;
            }
        }
        auto got = stats_from_log(r.log);
        EXPECT_EQ(got.identity_leaves, expect.identity_leaves) << file;
        EXPECT_EQ(got.identity_records, expect.identity_records) << file;
        EXPECT_EQ(got.registration_leaves, expect.registration_leaves) << file;
        EXPECT_EQ(got.association_leaves, expect.association_leaves) << file;
        EXPECT_EQ(got.registration_nullifiers, expect.registration_nullifiers) << file;
        EXPECT_EQ(got.association_nullifiers, expect.association_nullifiers) << file;
        EXPECT_EQ(got.blocked, expect.blocked) << file;
        EXPECT_EQ(got.key_refreshes, expect.key_refreshes) << file;
        auto j = json::parse(stats_to_json(got));
        EXPECT_EQ(j.at("identity_leaves"), got.identity_leaves);
    }
}

class Shipped : public ::testing::TestWithParam<std::string> {};

TEST_P(Shipped, MeetsEveryExpectationAndReplays) {
    auto script = parse_script(read_file(std::filesystem::path(SYBILID_SCENARIO_DIR) / GetParam()));
    auto seed = resolve_seed(script, std::nullopt);
    auto r = run_scenario(script, seed);
    ASSERT_TRUE(r.passed()) << r.actions.back().text << " -> " << r.actions.back().outcome << " " << r.actions.back().detail;
    EXPECT_EQ(r.actions.size(), script.actions.size());
    EXPECT_EQ(run_scenario(script, seed).log, r.log);
    EXPECT_EQ(replay_log(r.log).kind, ReplayVerdict::Kind::Consistent);
}

INSTANTIATE_TEST_SUITE_P(Scenarios, Shipped, ::testing::ValuesIn(scenario_files()), [](const auto& info) {
    std::string s = info.param.substr(0, info.param.find('.'));
    std::replace(s.begin(), s.end(), '-', '_');
    s.erase(std::remove(s.begin(), s.end(), '_'), s.end());
    return s;
});
