#pragma once

#include "sybilid/deployment.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sybilid::harness {

// Script format: one action per line, `#` starts a comment.
//
//   seed 7
//   config depth=16 window=64 randomized=yes
//   keygen alice alice.id
//   publish alice.id
//   present p1 cred=c1 verifier=shop predicate="age >= 18" expect=ok
//
// Values containing spaces are double-quoted. Every action may end with
// `expect=<ErrorName>`; the default is `expect=ok`.

struct ScriptAction {
    std::size_t line = 0;
    std::string text; // the source line, trimmed
    std::string verb;
    std::vector<std::string> args;
    std::map<std::string, std::string> options;
    std::string expect = "ok";
};

struct Script {
    std::optional<std::uint64_t> seed;
    DeploymentOptions deployment;
    std::vector<std::string> config_lines;
    std::vector<ScriptAction> actions;
};

/// Throws ScriptError naming the line for syntax errors and unknown verbs.
Script parse_script(std::string_view text);

struct ActionReport {
    std::uint64_t seq = 0;
    std::string text;
    std::string expected;
    std::string outcome;
    std::string detail; // error message when rejected
};

struct RegistryStats {
    std::uint64_t identity_leaves = 0;
    std::uint64_t registration_leaves = 0;
    std::uint64_t association_leaves = 0;
    std::uint64_t identity_records = 0;
    std::uint64_t registration_nullifiers = 0;
    std::uint64_t association_nullifiers = 0;
    std::uint64_t blocked = 0;
    std::uint64_t key_refreshes = 0;
    std::map<std::string, std::uint64_t> issuer_leaves;      // by issuer identifier name
    std::map<std::string, std::uint64_t> revocation_buckets; // consumed n_rv
    std::map<std::string, std::uint64_t> campaign_credential_nullifiers;
    std::map<std::string, std::uint64_t> campaign_association_nullifiers;
};

struct RunReport {
    std::uint64_t seed = 0;
    std::vector<ActionReport> actions;
    std::optional<std::uint64_t> divergence; // seq of the first unmet expectation
    std::string final_digest;
    std::string log; // line-delimited JSON
    RegistryStats stats;
    std::map<std::string, std::string> credentials; // name -> credential text, holder view

    bool passed() const { return !divergence; }
};

/// Runs every action until the first divergence. Throws ScriptError for references to
/// objects that do not exist.
RunReport run_scenario(const Script& script, std::uint64_t seed);

/// Seed precedence: explicit value, the script's `seed` line, SYBILID_SEED, then 1.
std::uint64_t resolve_seed(const Script& script, std::optional<std::uint64_t> explicit_seed);

struct ReplayVerdict {
    enum class Kind { Consistent, Inconsistent, Truncated };
    Kind kind = Kind::Consistent;
    std::uint64_t records = 0;            // records checked and found consistent
    std::optional<std::uint64_t> divergent_seq;
    std::string detail;
};

/// Re-executes the script recorded in the log header and compares every record.
/// Throws LogError when the header or a record cannot be parsed.
ReplayVerdict replay_log(std::string_view log);

/// Header and the record at `at`, or header and a record summary when absent. JSON text.
std::string inspect_log(std::string_view log, std::optional<std::uint64_t> at);

/// Rebuilds the state recorded in the log and counts it.
RegistryStats stats_from_log(std::string_view log);
std::string stats_to_json(const RegistryStats& stats);

} // namespace sybilid::harness
