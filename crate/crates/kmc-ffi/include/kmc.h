/* C interface to the kmc model checker.
 *
 * Pipeline: kmc_model_load -> kmc_graph_build -> kmc_check_formula /
 * kmc_report_json.  Handles are opaque and must be released exactly
 * once with the matching _free function.  All strings are
 * NUL-terminated UTF-8; strings returned by the library are released
 * with kmc_string_free.
 */

#ifndef KMC_H
#define KMC_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Opaque handle to a compiled model. */
typedef struct KmcModel KmcModel;

/* Opaque handle to a built state graph. */
typedef struct KmcGraph KmcGraph;

/* Status codes returned by fallible entry points. */
typedef enum KmcStatus {
  KMC_OK = 0,
  /* A required pointer argument was null or text was not UTF-8. */
  KMC_BAD_ARGUMENT = 1,
  /* The model text failed to parse or validate. */
  KMC_BAD_MODEL = 2,
  /* State-graph construction hit the state limit. */
  KMC_LIMIT_EXCEEDED = 3,
  /* No formula with the requested name exists. */
  KMC_UNKNOWN_FORMULA = 4,
  /* An internal invariant failed (a bug; never expected). */
  KMC_INTERNAL = 5,
} KmcStatus;

/* Parses and validates a model from NUL-terminated text.  Returns a
 * handle, or NULL with *err_out set to the parse or validation
 * message (release it with kmc_string_free).  err_out may be NULL. */
KmcModel *kmc_model_load(const char *text, char **err_out);

/* Releases a model handle.  NULL is a no-op. */
void kmc_model_free(KmcModel *model);

/* Number of formulas declared in the model. */
uint64_t kmc_model_formula_count(const KmcModel *model);

/* Builds the reachable state graph, exploring at most limit states.
 * Returns a handle, or NULL with *err_out set.  err_out may be NULL. */
KmcGraph *kmc_graph_build(const KmcModel *model, uint64_t limit,
                          char **err_out);

/* Releases a graph handle.  NULL is a no-op. */
void kmc_graph_free(KmcGraph *graph);

/* Number of reachable states in a built graph. */
uint64_t kmc_graph_states(const KmcGraph *graph);

/* Number of transitions in a built graph. */
uint64_t kmc_graph_edges(const KmcGraph *graph);

/* Checks one named formula.  On KMC_OK, *holds_out is 1 when the
 * formula holds in every initial state (0 otherwise) and
 * *sat_count_out is the number of satisfying reachable states.
 * Output pointers may be NULL. */
KmcStatus kmc_check_formula(const KmcModel *model, const KmcGraph *graph,
                            const char *name, int32_t *holds_out,
                            uint64_t *sat_count_out);

/* Checks every formula and returns the JSON report (states, edges,
 * build time, per-formula verdicts and traces), or NULL on failure.
 * Release with kmc_string_free. */
char *kmc_report_json(const KmcModel *model, const KmcGraph *graph);

/* Reformats model text into canonical form.  Returns NULL with
 * *err_out set on parse failure.  Release with kmc_string_free. */
char *kmc_format(const char *text, char **err_out);

/* Returns the bundled surveillance scenario as model text.  Release
 * with kmc_string_free. */
char *kmc_scenario_text(void);

/* Releases a string returned by this library.  NULL is a no-op. */
void kmc_string_free(char *s);

#ifdef __cplusplus
}
#endif

#endif /* KMC_H */
