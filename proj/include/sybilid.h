#ifndef SYBILID_H
#define SYBILID_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SID_API __declspec(dllexport)
#else
#define SID_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sid_status {
    SID_OK = 0,
    SID_INVALID_INPUT = 1,
    SID_INVALID_SCALAR = 2,
    SID_INVALID_SIGNATURE = 3,
    SID_ENCODING_ERROR = 4,
    SID_UNKNOWN_RELATION = 5,
    SID_UNSATISFIED_RELATION = 6,
    SID_SCHEMA_ERROR = 7,
    SID_RELATION_MISMATCH = 8,
    SID_CAPACITY_EXCEEDED = 9,
    SID_NOT_FOUND = 10,
    SID_STALE_ROOT = 11,
    SID_REVOKED = 12,
    SID_CHALLENGE_MISMATCH = 13,
    SID_ISSUANCE_AUDIT = 14,
    SID_CONFLICT = 15,
    SID_ALREADY_ASSOCIATED = 16,
    SID_STALE_ASSOCIATION = 17,
    SID_UNAUTHORIZED = 18,
    SID_DUPLICATE_NULLIFIER = 19,
    SID_BLOCKED = 20,
    SID_SCRIPT_ERROR = 21,
    SID_LOG_ERROR = 22,
    SID_IO_ERROR = 23
} sid_status;

/* Result of one scenario run. Strings returned from accessors are owned by the run. */
typedef struct sid_run sid_run;

typedef struct sid_action_info {
    uint64_t seq;
    const char* line;
    const char* expected;
    const char* outcome;
    const char* detail;
} sid_action_info;

typedef enum sid_verdict { SID_CONSISTENT = 0, SID_INCONSISTENT = 1, SID_TRUNCATED = 2 } sid_verdict;

typedef struct sid_replay_result {
    sid_verdict verdict;
    uint64_t records;       /* records found consistent */
    int has_divergence;
    uint64_t divergent_seq; /* valid when has_divergence */
    char detail[256];
} sid_replay_result;

SID_API const char* sid_version(void);
SID_API const char* sid_status_name(sid_status status);
/* Message for the last failing call on this thread; empty string when none. */
SID_API const char* sid_last_error(void);
/* Frees strings returned through char** out parameters. */
SID_API void sid_string_free(char* s);

SID_API sid_status sid_read_file(const char* path, char** out_text);

/* seed may be NULL: the script's seed line, then SYBILID_SEED, then 1. A run that
   diverges from its expectations still returns SID_OK; see sid_run_passed. */
SID_API sid_status sid_run_script(const char* script_text, const uint64_t* seed, sid_run** out);
SID_API sid_status sid_run_script_file(const char* path, const uint64_t* seed, sid_run** out);
SID_API void sid_run_free(sid_run* run);

SID_API uint64_t sid_run_seed(const sid_run* run);
SID_API int sid_run_passed(const sid_run* run);
/* Returns 1 and sets *seq when the run stopped at an unmet expectation. */
SID_API int sid_run_divergence(const sid_run* run, uint64_t* seq);
SID_API size_t sid_run_action_count(const sid_run* run);
SID_API sid_status sid_run_action(const sid_run* run, size_t index, sid_action_info* out);
SID_API const char* sid_run_log(const sid_run* run);
SID_API const char* sid_run_final_digest(const sid_run* run);
SID_API sid_status sid_run_write_log(const sid_run* run, const char* path);
/* Credentials created by the run, in name order, as credential file text. */
SID_API size_t sid_run_credential_count(const sid_run* run);
SID_API sid_status sid_run_credential(const sid_run* run, size_t index, const char** name, const char** text);

SID_API sid_status sid_replay(const char* log_text, sid_replay_result* out);
/* at may be NULL for a summary of every record. */
SID_API sid_status sid_log_inspect(const char* log_text, const uint64_t* at, char** out_json);
SID_API sid_status sid_log_stats(const char* log_text, char** out_json);

/* Fresh identifier and key pair under the default deployment. seed may be NULL. */
SID_API sid_status sid_keygen(const uint64_t* seed, char** out_json);
/* Decodes a credential file's text and reports its digest and claims. */
SID_API sid_status sid_credential_show(const char* text, char** out_json);

#ifdef __cplusplus
}
#endif

#endif
