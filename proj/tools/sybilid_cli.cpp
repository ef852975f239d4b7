// Command-line front end. Talks to the library only through sybilid.h.

#include "sybilid.h"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

namespace {

constexpr int kOk = 0;
constexpr int kDiverged = 1;
constexpr int kUsage = 2;

int report_failure(sid_status st) {
    std::cerr << "error: " << sid_last_error() << "\n";
    return st == SID_OK ? kOk : kUsage;
}

struct Text {
    char* p = nullptr;
    ~Text() { sid_string_free(p); }
};

const uint64_t* seed_ptr(const std::optional<uint64_t>& s) {
    return s ? &*s : nullptr;
}

int scenario_run(const std::string& file, const std::optional<uint64_t>& seed, const std::string& log_path,
                 const std::string& export_dir, bool quiet) {
    sid_run* run = nullptr;
    sid_status st = sid_run_script_file(file.c_str(), seed_ptr(seed), &run);
    if (st != SID_OK) return report_failure(st);
    std::unique_ptr<sid_run, void (*)(sid_run*)> guard(run, sid_run_free);

    if (!quiet) {
        for (size_t i = 0; i < sid_run_action_count(run); ++i) {
            sid_action_info a{};
            sid_run_action(run, i, &a);
            bool met = std::string(a.expected) == a.outcome;
            std::printf("%4llu %-4s %-20s %s\n", static_cast<unsigned long long>(a.seq), met ? "ok" : "FAIL", a.outcome,
                        a.line);
            if (!met) std::printf("          expected %s; %s\n", a.expected, a.detail);
        }
    }
    if (!log_path.empty() && (st = sid_run_write_log(run, log_path.c_str())) != SID_OK) return report_failure(st);
    if (!export_dir.empty()) {
        std::filesystem::create_directories(export_dir);
        for (size_t i = 0; i < sid_run_credential_count(run); ++i) {
            const char* name = nullptr;
            const char* text = nullptr;
            sid_run_credential(run, i, &name, &text);
            std::ofstream(std::filesystem::path(export_dir) / (std::string(name) + ".json")) << text << "\n";
        }
    }
    uint64_t seq = 0;
    if (sid_run_divergence(run, &seq)) {
        std::printf("diverged at seq %llu (seed %llu)\n", static_cast<unsigned long long>(seq),
                    static_cast<unsigned long long>(sid_run_seed(run)));
        return kDiverged;
    }
    std::printf("passed: %zu actions, seed %llu, final state %s\n", sid_run_action_count(run),
                static_cast<unsigned long long>(sid_run_seed(run)), sid_run_final_digest(run));
    return kOk;
}

int load(const std::string& path, Text& log) {
    sid_status st = sid_read_file(path.c_str(), &log.p);
    return st == SID_OK ? kOk : report_failure(st);
}

int scenario_replay(const std::string& path) {
    Text log;
    if (int rc = load(path, log)) return rc;
    sid_replay_result r{};
    sid_status st = sid_replay(log.p, &r);
    if (st != SID_OK) return report_failure(st);
    switch (r.verdict) {
    case SID_CONSISTENT:
        std::printf("consistent: %llu records\n", static_cast<unsigned long long>(r.records));
        return kOk;
    case SID_TRUNCATED:
        std::printf("truncated: consistent prefix of %llu records (%s)\n", static_cast<unsigned long long>(r.records),
                    r.detail);
        return kOk;
    case SID_INCONSISTENT:
        break;
    }
    std::printf("inconsistent at seq %llu: %s\n", static_cast<unsigned long long>(r.divergent_seq), r.detail);
    return kDiverged;
}

int print_json(sid_status st, Text& out) {
    if (st != SID_OK) return report_failure(st);
    std::printf("%s\n", out.p);
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sybil-resistant identity protocol simulator"};
    app.require_subcommand(1);

    auto* scenario = app.add_subcommand("scenario", "Run or replay scenario scripts");
    scenario->require_subcommand(1);
    std::string file, log_path, export_dir;
    std::optional<uint64_t> seed;
    bool quiet = false;
    auto* run = scenario->add_subcommand("run", "Run a script and check every expectation");
    run->add_option("file", file, "Scenario script")->required();
    run->add_option("--seed", seed, "Seed (overrides the script and SYBILID_SEED)");
    run->add_option("--log", log_path, "Write the ledger log here");
    run->add_option("--export-creds", export_dir, "Write every issued credential into this directory");
    run->add_flag("-q,--quiet", quiet, "Only print the summary");
    std::string replay_path;
    auto* replay = scenario->add_subcommand("replay", "Re-execute a ledger log and compare every record");
    replay->add_option("log", replay_path, "Ledger log")->required();

    auto* ledger = app.add_subcommand("ledger", "Ledger log tools");
    ledger->require_subcommand(1);
    std::string inspect_path;
    std::optional<uint64_t> at;
    auto* inspect = ledger->add_subcommand("inspect", "Show the log header and records");
    inspect->add_option("log", inspect_path, "Ledger log")->required();
    inspect->add_option("--at", at, "Show the record with this sequence number");

    std::optional<uint64_t> key_seed;
    auto* keygen = app.add_subcommand("keygen", "Generate an identifier and key pair");
    keygen->add_option("--seed", key_seed, "Deterministic seed");

    auto* cred = app.add_subcommand("cred", "Credential tools");
    cred->require_subcommand(1);
    std::string cred_path;
    auto* show = cred->add_subcommand("show", "Decode a credential file");
    show->add_option("file", cred_path, "Credential file")->required();

    auto* vdr = app.add_subcommand("vdr", "Registry tools");
    vdr->require_subcommand(1);
    std::string stats_path;
    auto* stats = vdr->add_subcommand("stats", "Tree sizes and nullifier counts after a logged run");
    stats->add_option("log", stats_path, "Ledger log")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    if (run->parsed()) return scenario_run(file, seed, log_path, export_dir, quiet);
    if (replay->parsed()) return scenario_replay(replay_path);
    if (inspect->parsed()) {
        Text log, out;
        if (int rc = load(inspect_path, log)) return rc;
        return print_json(sid_log_inspect(log.p, seed_ptr(at), &out.p), out);
    }
    if (keygen->parsed()) {
        Text out;
        return print_json(sid_keygen(seed_ptr(key_seed), &out.p), out);
    }
    if (show->parsed()) {
        Text text, out;
        if (int rc = load(cred_path, text)) return rc;
        return print_json(sid_credential_show(text.p, &out.p), out);
    }
    if (stats->parsed()) {
        Text log, out;
        if (int rc = load(stats_path, log)) return rc;
        return print_json(sid_log_stats(log.p, &out.p), out);
    }
    return kUsage;
}
