#ifndef STABMATCH_H
#define STABMATCH_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes mirroring the CLI exit codes.
 */
typedef enum SmStatus {
  /**
   * Success; for region checks: the measure is a member.
   */
  SmOk = 0,
  /**
   * Invalid arguments at the ABI boundary (null pointers, bad UTF-8,
   * unknown mode names).
   */
  SmUsage = 1,
  /**
   * Malformed input data or failed validation.
   */
  SmInput = 2,
  /**
   * The measure is not a member of the requested region.
   */
  SmNotMember = 3,
} SmStatus;

/**
 * Opaque compatibility multigraph.
 */
typedef struct SmGraph SmGraph;

/**
 * Opaque node measure tied to the graph it was parsed against.
 */
typedef struct SmMeasure SmMeasure;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the thread-local message describing the most recent failure.
 * The result must be freed with `sm_string_free`.
 */
char *sm_last_error(void);

/**
 * Frees a string returned by this library. Null is a no-op.
 *
 * # Safety
 * `s` must have been returned by this library and not freed before.
 */
void sm_string_free(char *s);

/**
 * Parses the edge-list format (`u v` per line, `u u` a self-loop,
 * `#` comments). On success stores a graph handle in `out`.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string; `out` a valid pointer.
 */
enum SmStatus sm_graph_parse(const char *text, struct SmGraph **out);

/**
 * # Safety
 * `g` must be a graph handle from `sm_graph_parse`, not freed before.
 */
void sm_graph_free(struct SmGraph *g);

/**
 * Serializes the graph back to the edge-list format.
 *
 * # Safety
 * `g` must be a valid graph handle.
 */
char *sm_graph_serialize(const struct SmGraph *g);

/**
 * Number of nodes of the graph; 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a valid graph handle.
 */
uintptr_t sm_graph_node_count(const struct SmGraph *g);

/**
 * Parses a measure file (`node value` lines, decimals or `p/q`) against
 * the graph; every node needs exactly one positive value.
 *
 * # Safety
 * `g` must be a valid graph handle; `text` a valid string; `out` valid.
 */
enum SmStatus sm_measure_parse(const struct SmGraph *g, const char *text, struct SmMeasure **out);

/**
 * # Safety
 * `m` must be a measure handle from `sm_measure_parse`, not freed before.
 */
void sm_measure_free(struct SmMeasure *m);

/**
 * Region membership. `region` is `"general"`, `"bipartite"` or `"asym"`
 * (the latter requires `v1_csv`, a comma-separated node list). Returns
 * `SmOk` for members and `SmNotMember` otherwise; `out_json` (nullable)
 * receives the verdict document.
 *
 * # Safety
 * Handles must be valid; strings valid or null as documented.
 */
enum SmStatus sm_check(const struct SmGraph *g,
                       const struct SmMeasure *m,
                       const char *region,
                       const char *v1_csv,
                       char **out_json);

/**
 * Constructive decomposition. `mode` is `"general"`, `"asym"` or
 * `"maxflow"` (the latter two require `v1_csv`). `SmOk` when strictly
 * positive weights exist, `SmNotMember` otherwise; `out_json` receives
 * weights or the certificate.
 *
 * # Safety
 * Handles must be valid; strings valid or null as documented.
 */
enum SmStatus sm_decompose(const struct SmGraph *g,
                           const struct SmMeasure *m,
                           const char *mode,
                           const char *v1_csv,
                           char **out_json);

/**
 * Closed-form matching rates (`kind` one of unique/none/family in the
 * JSON). `SmInput` on topologies without a closed form.
 *
 * # Safety
 * Handles must be valid.
 */
enum SmStatus sm_rates(const struct SmGraph *g, const struct SmMeasure *m, char **out_json);

/**
 * Simulates the general matching model (`policy` one of fcfm/ml/random);
 * the measure is normalized internally. JSON mirrors the CLI output.
 *
 * # Safety
 * Handles must be valid.
 */
enum SmStatus sm_simulate(const struct SmGraph *g,
                          const struct SmMeasure *m,
                          const char *policy,
                          uint64_t steps,
                          uint64_t seed,
                          uint64_t replications,
                          char **out_json);

/**
 * Simulates the extended bipartite model with the product arrival law of
 * the two marginal files (`node value` lines; normalized internally).
 *
 * # Safety
 * Handles and strings must be valid.
 */
enum SmStatus sm_simulate_bipartite(const struct SmGraph *g,
                                    const char *marginal1,
                                    const char *marginal2,
                                    const char *policy,
                                    uint64_t steps,
                                    uint64_t seed,
                                    char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STABMATCH_H */
