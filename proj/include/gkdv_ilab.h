#pragma once

/* C interface to the gKdV I-method laboratory.
 *
 * Usage: create a session, pick an experiment kind, optionally load a config
 * file and apply key=value overrides, run, then write the report (CSV plus a
 * JSON sidecar). All functions return a gkdv_status; string getters return
 * pointers owned by the session, valid until the next call on that session.
 */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gkdv_status {
    GKDV_OK = 0,
    GKDV_CHECK_FAILED = 1,
    GKDV_USAGE_ERROR = 2,
    GKDV_DIVERGED = 3,
    GKDV_IO_ERROR = 4,
    GKDV_INTERNAL_ERROR = 5,
} gkdv_status;

typedef struct gkdv_session gkdv_session;

gkdv_session* gkdv_session_create(void);
void gkdv_session_destroy(gkdv_session* session);

/* Experiment kind by name: simulate, soliton-test, conservation,
 * almost-conservation, counterexample, bilinear-probe, identities,
 * global-continuation, sweep. */
gkdv_status gkdv_select_kind(gkdv_session* session, const char* kind);

/* Config file with one `key = value` per line; `#` starts a comment. The file
 * is read when the session runs; this call only checks it is readable. */
gkdv_status gkdv_load_config(gkdv_session* session, const char* path);

/* Applies one override on top of the file. The key and value are validated
 * immediately; unknown keys and out-of-range values are usage errors. */
gkdv_status gkdv_set(gkdv_session* session, const char* key, const char* value);

/* Resolves the configuration (defaults, then file, then overrides in order)
 * and runs the experiment. GKDV_OK means the machinery completed; whether the
 * scientific checks passed is a separate query. */
gkdv_status gkdv_run(gkdv_session* session);

/* 1, 0, or -1 when nothing has run yet. */
int gkdv_checks_passed(const gkdv_session* session);
int gkdv_divergence_flagged(const gkdv_session* session);

/* Writes <kind>.csv and <kind>.json under out_dir (created if needed).
 * The sidecar path is available from gkdv_report_path afterwards. */
gkdv_status gkdv_write_report(gkdv_session* session, const char* out_dir);
const char* gkdv_report_path(const gkdv_session* session);

/* Message from the most recent failing call; empty string if none. */
const char* gkdv_error_message(const gkdv_session* session);

const char* gkdv_version(void);

#ifdef __cplusplus
}
#endif
