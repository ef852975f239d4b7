#include "sybilid.h"

#include "sybilid/credential.hpp"
#include "sybilid/crypto.hpp"
#include "sybilid/errors.hpp"
#include "sybilid/harness.hpp"

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

using namespace sybilid;
using nlohmann::json;

struct sid_run {
    harness::RunReport report;
    std::vector<std::pair<std::string, std::string>> credentials;
};

namespace {

thread_local std::string g_last_error;

sid_status record(ErrorCode code, const std::string& message) {
    g_last_error = message;
    return static_cast<sid_status>(code);
}

// Runs fn and converts any exception into a status; clears the last error on success.
template <typename Fn>
sid_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return SID_OK;
    } catch (const ProtocolError& e) {
        return record(e.code(), e.what());
    } catch (const std::bad_alloc&) {
        return record(ErrorCode::CapacityExceeded, "out of memory");
    } catch (const std::exception& e) {
        return record(ErrorCode::InvalidInput, e.what());
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

std::string slurp(const char* path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoError, std::string("cannot open ") + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void require(const void* p, const char* what) {
    if (!p) fail(ErrorCode::InvalidInput, std::string(what) + " is null");
}

std::optional<std::uint64_t> opt_seed(const uint64_t* seed) {
    return seed ? std::optional<std::uint64_t>(*seed) : std::nullopt;
}

sid_status run_text(const std::string& text, const uint64_t* seed, sid_run** out) {
    return guarded([&] {
        require(out, "out");
        auto script = harness::parse_script(text);
        auto run = std::make_unique<sid_run>();
        run->report = harness::run_scenario(script, harness::resolve_seed(script, opt_seed(seed)));
        for (const auto& kv : run->report.credentials) run->credentials.emplace_back(kv);
        *out = run.release();
    });
}

} // namespace

extern "C" {

const char* sid_version(void) {
    return "1.0.0";
}

const char* sid_status_name(sid_status status) {
    static thread_local std::string name;
    name = std::string(to_string(static_cast<ErrorCode>(status)));
    return name.c_str();
}

const char* sid_last_error(void) {
    return g_last_error.c_str();
}

void sid_string_free(char* s) {
    std::free(s);
}

sid_status sid_read_file(const char* path, char** out_text) {
    return guarded([&] {
        require(path, "path");
        require(out_text, "out_text");
        *out_text = dup_string(slurp(path));
    });
}

sid_status sid_run_script(const char* script_text, const uint64_t* seed, sid_run** out) {
    if (!script_text) return record(ErrorCode::InvalidInput, "script_text is null");
    return run_text(script_text, seed, out);
}

sid_status sid_run_script_file(const char* path, const uint64_t* seed, sid_run** out) {
    std::string text;
    sid_status st = guarded([&] {
        require(path, "path");
        text = slurp(path);
    });
    if (st != SID_OK) return st;
    return run_text(text, seed, out);
}

void sid_run_free(sid_run* run) {
    delete run;
}

uint64_t sid_run_seed(const sid_run* run) {
    return run ? run->report.seed : 0;
}

int sid_run_passed(const sid_run* run) {
    return run && run->report.passed() ? 1 : 0;
}

int sid_run_divergence(const sid_run* run, uint64_t* seq) {
    if (!run || !run->report.divergence) return 0;
    if (seq) *seq = *run->report.divergence;
    return 1;
}

size_t sid_run_action_count(const sid_run* run) {
    return run ? run->report.actions.size() : 0;
}

sid_status sid_run_action(const sid_run* run, size_t index, sid_action_info* out) {
    return guarded([&] {
        require(run, "run");
        require(out, "out");
        if (index >= run->report.actions.size()) fail(ErrorCode::NotFound, "action index out of range");
        const auto& a = run->report.actions[index];
        *out = sid_action_info{a.seq, a.text.c_str(), a.expected.c_str(), a.outcome.c_str(), a.detail.c_str()};
    });
}

const char* sid_run_log(const sid_run* run) {
    return run ? run->report.log.c_str() : "";
}

const char* sid_run_final_digest(const sid_run* run) {
    return run ? run->report.final_digest.c_str() : "";
}

sid_status sid_run_write_log(const sid_run* run, const char* path) {
    return guarded([&] {
        require(run, "run");
        require(path, "path");
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorCode::IoError, std::string("cannot write ") + path);
        out << run->report.log;
        if (!out) fail(ErrorCode::IoError, std::string("write failed for ") + path);
    });
}

size_t sid_run_credential_count(const sid_run* run) {
    return run ? run->credentials.size() : 0;
}

sid_status sid_run_credential(const sid_run* run, size_t index, const char** name, const char** text) {
    return guarded([&] {
        require(run, "run");
        if (index >= run->credentials.size()) fail(ErrorCode::NotFound, "credential index out of range");
        if (name) *name = run->credentials[index].first.c_str();
        if (text) *text = run->credentials[index].second.c_str();
    });
}

sid_status sid_replay(const char* log_text, sid_replay_result* out) {
    return guarded([&] {
        require(log_text, "log_text");
        require(out, "out");
        auto v = harness::replay_log(log_text);
        *out = sid_replay_result{};
        switch (v.kind) {
        case harness::ReplayVerdict::Kind::Consistent:
            out->verdict = SID_CONSISTENT;
            break;
        case harness::ReplayVerdict::Kind::Inconsistent:
            out->verdict = SID_INCONSISTENT;
            break;
        case harness::ReplayVerdict::Kind::Truncated:
            out->verdict = SID_TRUNCATED;
            break;
        }
        out->records = v.records;
        out->has_divergence = v.divergent_seq ? 1 : 0;
        out->divergent_seq = v.divergent_seq.value_or(0);
        std::strncpy(out->detail, v.detail.c_str(), sizeof(out->detail) - 1);
    });
}

sid_status sid_log_inspect(const char* log_text, const uint64_t* at, char** out_json) {
    return guarded([&] {
        require(log_text, "log_text");
        require(out_json, "out_json");
        *out_json = dup_string(harness::inspect_log(log_text, opt_seed(at)));
    });
}

sid_status sid_log_stats(const char* log_text, char** out_json) {
    return guarded([&] {
        require(log_text, "log_text");
        require(out_json, "out_json");
        *out_json = dup_string(harness::stats_to_json(harness::stats_from_log(log_text)));
    });
}

sid_status sid_keygen(const uint64_t* seed, char** out_json) {
    return guarded([&] {
        require(out_json, "out_json");
        auto d = make_deployment();
        std::mt19937_64 rng(seed ? *seed : std::random_device{}());
        FieldElement id = d->field().random(rng);
        KeyPair kp = keygen(*d, rng);
        json j{{"id", d->field().to_hex(id)}, {"sk", d->field().to_hex(kp.sk)}, {"pk", encode_public_key(*d, kp.pk)}};
        *out_json = dup_string(j.dump(2));
    });
}

sid_status sid_credential_show(const char* text, char** out_json) {
    return guarded([&] {
        require(text, "text");
        require(out_json, "out_json");
        auto d = make_deployment();
        auto enums = EnumRegistry::with_builtins();
        Credential cred = credential_from_text(*d, enums, text);
        const auto& f = d->field();
        json claims = json::array();
        for (const auto& c : cred.claims) {
            json jc{{"key", c.key}, {"kind", std::string(to_string(c.value.kind))}, {"encoded", f.to_hex(c.encoded)}};
            if (c.value.kind == ClaimKind::Int) {
                jc["value"] = c.value.integer;
            } else {
                jc["value"] = c.value.text;
            }
            if (!c.value.table.empty()) jc["table"] = c.value.table;
            claims.push_back(jc);
        }
        json j{{"issuer_id", f.to_hex(cred.issuer_id)},
               {"holder_id", f.to_hex(cred.holder_id)},
               {"digest", f.to_hex(cred.digest(*d))},
               {"signature", encode_signature(*d, cred.signature)},
               {"claims", claims}};
        *out_json = dup_string(j.dump(2));
    });
}

} // extern "C"
