/* fmxwb: C interface to the FMX workbench core.
 *
 * Conventions:
 *   - Functions returning fmxwb_status yield FMXWB_OK (0) on success; on any
 *     other code, fmxwb_last_error() holds a message for the calling thread.
 *   - Output buffers (uint8_t** / char**) are allocated by the library and
 *     released with fmxwb_free(). Strings are NUL-terminated.
 *   - Structured options and results travel as JSON text to keep the surface
 *     small and ABI-stable.
 */
#ifndef FMXWB_H
#define FMXWB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fmxwb_status {
    FMXWB_OK = 0,
    FMXWB_E_NOT_FMX = 1,
    FMXWB_E_TRUNCATED = 2,
    FMXWB_E_KEY_LENGTH = 3,
    FMXWB_E_BLOCK_SIZE = 4,
    FMXWB_E_ALIGNMENT = 5,
    FMXWB_E_CHECKSUM_MISMATCH = 6,
    FMXWB_E_PARSE = 7,
    FMXWB_E_UNKNOWN_NAME = 8,
    FMXWB_E_INVALID_RANGE = 9,
    FMXWB_E_INVALID_CONFIG = 10,
    FMXWB_E_IO = 11,
    FMXWB_E_UNKNOWN_HANDLER = 12,
    FMXWB_E_UNKNOWN_SERVICE = 13,
    FMXWB_E_FORBIDDEN_SERVICE = 14,
    FMXWB_E_SCHEMA = 15,
    FMXWB_E_EMPTY_CAPTURE = 16,
    FMXWB_E_INTERNAL = 17,
} fmxwb_status;

/* Message for the most recent failure on this thread; never NULL. */
const char* fmxwb_last_error(void);

void fmxwb_free(void* ptr);

/* ---- FMX container and cipher pipeline ---------------------------------- */

/* 1 when data starts with the FMX magic, else 0. */
int fmxwb_fmx_detect(const uint8_t* data, size_t len);

/* Header and payload summary as JSON. profile: "main" | "checksum". */
fmxwb_status fmxwb_fmx_inspect(const uint8_t* data, size_t len, const char* profile,
                               char** out_json);

/* options_json keys:
 *   key_hex (required, 8..112 hex digits)
 *   seed (u32) or identity {device_code, rf_code, bluetooth, machine_type,
 *     firmware_version} for the digest-derived seed
 *   transform: "identity" | "index"        (default "identity")
 *   profile:   "main" | "checksum"         (default "main")
 *   padding:   "zero" | "pkcs7" | "none"   (default "zero")
 *   checksum:  bool                        (default false)
 *   version:   u32                         (default 1)
 */
fmxwb_status fmxwb_fmx_wrap(const uint8_t* plaintext, size_t len, const char* options_json,
                            uint8_t** out, size_t* out_len);

fmxwb_status fmxwb_fmx_load(const uint8_t* file, size_t len, const char* options_json,
                            uint8_t** out, size_t* out_len);

/* Strip the 32-byte header, zero-fill the trailing partial block, ECB-decrypt. */
fmxwb_status fmxwb_fmx_dec2(const uint8_t* file, size_t len, const uint8_t* key,
                            size_t key_len, uint8_t** out, size_t* out_len);

/* options_json keys:
 *   identity (required): {device_code, rf_code, bluetooth, machine_type,
 *     firmware_version}
 *   workers (default 1), suffix_max_len (default 2, max 6),
 *   pattern_budget / suffix_budget (default 0 = unlimited),
 *   suffix_phase (default true)
 * Report JSON: {outcome, key_hex?, phase?, candidate_index?, family?,
 *   total_tested, tested_per_family, weak_accepts, elapsed_seconds}.
 */
fmxwb_status fmxwb_crack(const uint8_t* file, size_t len, const char* options_json,
                         char** report_json);

/* ---- Orchestrator simulation -------------------------------------------- */

typedef struct fmxwb_orch fmxwb_orch;

/* config_json: master-service schema (services/commands/groups/protections/
 * startup_sequence). scenario_json scripts the simulated children; NULL means
 * every child is healthy. */
fmxwb_status fmxwb_orch_create(const char* config_json, const char* scenario_json,
                               fmxwb_orch** out);

/* As above but decrypting an FMX-wrapped config first. */
fmxwb_status fmxwb_orch_create_wrapped(const uint8_t* config, size_t len,
                                       const char* pipeline_options_json,
                                       const char* scenario_json, fmxwb_orch** out);

void fmxwb_orch_destroy(fmxwb_orch* orch);

fmxwb_status fmxwb_orch_run_startup(fmxwb_orch* orch);

/* Advance the simulated clock, processing due events. */
fmxwb_status fmxwb_orch_advance(fmxwb_orch* orch, int64_t micros);

int64_t fmxwb_orch_now(const fmxwb_orch* orch);

/* request: {"handler": name, "args": {...}}; response: {"ok":true,"result":...}
 * or {"ok":false,"error":{"code","message"}}. Always returns FMXWB_OK with a
 * response document unless arguments are invalid at the C level. */
fmxwb_status fmxwb_orch_rpc(fmxwb_orch* orch, const char* request_json, char** response_json);

/* Event log accumulated since the last drain, one JSON object per line. */
fmxwb_status fmxwb_orch_drain_events(fmxwb_orch* orch, char** jsonl);

/* Serve newline-delimited JSON RPC on a unix socket. time_scale maps wall
 * seconds to simulated seconds (0 freezes the clock); serve_seconds 0 means
 * no deadline (pair it with exit_on_disconnect to stop after one client). */
fmxwb_status fmxwb_orch_serve(fmxwb_orch* orch, const char* socket_path,
                              double serve_seconds, double time_scale,
                              int exit_on_disconnect);

/* One-shot client: send a request line to a serving socket. */
fmxwb_status fmxwb_rpc_send(const char* socket_path, const char* request_json,
                            char** response_json);

/* ---- Telemetry ----------------------------------------------------------- */

/* Validates and normalizes a reportState document (canonical field order). */
fmxwb_status fmxwb_telemetry_parse(const char* report_json, char** normalized_json);

/* snapshot_json: same shape as a parsed report minus msgId. */
fmxwb_status fmxwb_telemetry_synth(const char* snapshot_json, int64_t clock_us,
                                   char** report_json);

/* capture_jsonl: {"timestamp","destination","byte_count"[,"payload_hex"]} per
 * line. allowlist_json: array of hosts / IPv4 CIDRs. */
fmxwb_status fmxwb_telemetry_analyze(const char* capture_jsonl, const char* allowlist_json,
                                     char** report_json);

/* policy_json: array of CIDR strings appended verbatim as deny rules. */
fmxwb_status fmxwb_telemetry_rules(const char* report_json, const char* policy_json,
                                   char** rules_text);

#ifdef __cplusplus
}
#endif

#endif /* FMXWB_H */
