#ifndef CANTORDIST_CAPI_H
#define CANTORDIST_CAPI_H

/* C interface to the cantordist engine.
 *
 * All work runs through cd_run / cd_run_file: pick a subcommand, hand over
 * the JSON config text (or a path to it), receive an opaque report handle.
 * The report text is the same canonical JSON the library writes everywhere;
 * its exit code follows the tool contract (0 success, 2 budget exhausted,
 * 3 verification failed, 4 bad config or domain input, 1 internal fault).
 *
 * Functions return CD_OK when a report was produced -- including runs whose
 * report carries a failure status. A nonzero cd_status means no report
 * exists; cd_last_error() then describes why in text form.
 */

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cd_status {
    CD_OK = 0,
    /* Mirrors of the engine's failure classes. */
    CD_ERR_INVALID_MODEL = 1,
    CD_ERR_INVALID_INTERVAL = 2,
    CD_ERR_INVALID_ADDRESS = 3,
    CD_ERR_EMPTY_RESTRICTION = 4,
    CD_ERR_MALFORMED_SPEC = 5,
    CD_ERR_DUPLICATE_POINT = 6,
    CD_ERR_NOT_ENOUGH_CELLS = 7,
    CD_ERR_DEGENERATE_PIN = 8,
    CD_ERR_SKELETON_CONFLICT = 9,
    CD_ERR_EMPTY_INTERSECTION = 10,
    CD_ERR_BUDGET_EXHAUSTED = 11,
    CD_ERR_DEPTH_TOO_LARGE = 12,
    CD_ERR_ADMISSIBILITY_FAILURE = 13,
    CD_ERR_NO_REALIZATION = 14,
    CD_ERR_CONFIG = 15,
    CD_ERR_VERIFY = 16,
    CD_ERR_INTERNAL = 17,
    /* C-boundary misuse (null pointers, empty command). */
    CD_ERR_BAD_ARGUMENT = 18
} cd_status;

/* Stable name of a status value, e.g. "ConfigError". Never NULL. */
const char* cd_status_name(cd_status s);

/* Process exit code the status maps to (CD_OK -> 0). */
int cd_status_exit_code(cd_status s);

/* One finished command run; owned by the caller, freed with cd_report_free. */
typedef struct cd_report cd_report;

/* Runs a subcommand ("certify", "partner", "chain", "tree", "metrics",
 * "sample", "verify") on the given JSON config text. For "verify" the
 * config is the certificate or report document itself.
 *
 * overrides_json may be NULL or "{}"; recognized keys:
 *   "mode": "exact"|"fast", "max_depth": N, "max_tasks": N,
 *   "threads": N, "seed": N.
 * Unknown keys are rejected. On success *out holds the report handle. */
cd_status cd_run(const char* command, const char* config_json,
                 const char* overrides_json, cd_report** out);

/* Same, reading the config document from a file. */
cd_status cd_run_file(const char* command, const char* config_path,
                      const char* overrides_json, cd_report** out);

/* Canonical report text (JSON, trailing newline). Valid while the handle
 * lives. Never NULL. */
const char* cd_report_text(const cd_report* r);

/* The run's process exit code per the tool contract. */
int cd_report_exit_code(const cd_report* r);

void cd_report_free(cd_report* r);

/* Message for the most recent failing call on this thread; empty string if
 * none. Valid until the next failing call on the same thread. */
const char* cd_last_error(void);

/* Library version, e.g. "0.1.0". */
const char* cd_version(void);

#ifdef __cplusplus
}
#endif

#endif /* CANTORDIST_CAPI_H */
