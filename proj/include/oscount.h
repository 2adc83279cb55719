/* oscount — eigenvalue counting for singular linear Hamiltonian systems via
 * renormalized oscillation theory.
 *
 * C interface to the shared library.  All objects are opaque handles; all
 * results are UTF-8 JSON documents allocated by the library and released
 * with oscount_string_free().  Functions return OSCOUNT_OK on success; on
 * failure the thread-local message from oscount_last_error() describes the
 * problem.
 */

#ifndef OSCOUNT_H
#define OSCOUNT_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#define OSCOUNT_OK 0
#define OSCOUNT_ERR_CONFIG 2    /* invalid parameters / preconditions */
#define OSCOUNT_ERR_NUMERIC 3   /* numerical failure during computation */

typedef struct oscount_problem oscount_problem;

/* Built-in problem by name ("hydrogen", "mhd", "saint-venant-synthetic")
 * with a JSON parameter map (may be NULL or ""). */
oscount_problem* oscount_problem_builtin(const char* name,
                                         const char* params_json);

/* Problem from a full JSON configuration ({"class": ..., ...}). */
oscount_problem* oscount_problem_from_json(const char* config_json);

void oscount_problem_free(oscount_problem* p);

/* Run a command: "classify", "count", "curves", "box", "verify".
 * options_json selects numeric options (all optional):
 *   {"lambda1": -3, "lambda2": -0.5833, "x_step": 1e-3, "lambda_step": 5e-3,
 *    "eps": 1e-10, "xmax": 10, "mu0": [0, 1], "lambda0": -1,
 *    "tol_rel": 1e-10, "tol_abs": 1e-12}
 * On success *result_json receives a malloc'd JSON string.  For "curves",
 * *csv (when non-NULL) receives the CSV table. */
int oscount_run(const oscount_problem* p, const char* command,
                const char* options_json, char** result_json, char** csv);

void oscount_string_free(char* s);

/* Thread-local message for the most recent failure in this thread. */
const char* oscount_last_error(void);

/* Library version string. */
const char* oscount_version(void);

#ifdef __cplusplus
}
#endif

#endif /* OSCOUNT_H */
