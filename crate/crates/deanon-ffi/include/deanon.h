#ifndef DEANON_H
#define DEANON_H

/* Generated by cbindgen from the deanon-ffi crate; regenerate with cargo build, do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Success.
 */
#define DN_OK 0

/**
 * A required pointer argument was null.
 */
#define DN_ERR_NULL_ARGUMENT 1

/**
 * An argument was malformed or out of range.
 */
#define DN_ERR_INVALID_INPUT 2

/**
 * The configuration cannot be satisfied (e.g. fingerprint pool too small).
 */
#define DN_ERR_INFEASIBLE 3

/**
 * A file could not be read or written.
 */
#define DN_ERR_IO 4

/**
 * The library panicked internally; state may be inconsistent.
 */
#define DN_ERR_PANIC 5

/**
 * Variant selector: exact search (zero tolerances).
 */
#define DN_VARIANT_ORIGINAL 0

/**
 * Variant selector: noise-tolerant search.
 */
#define DN_VARIANT_ROBUST 1

/**
 * Perturbation selector: release the graph unmodified.
 */
#define DN_PERTURB_NONE 0

/**
 * Perturbation selector: flip a rate-proportional number of random pairs.
 */
#define DN_PERTURB_RANDOM_FLIP 1

/**
 * Opaque experiment-configuration handle.
 */
typedef struct DnConfig DnConfig;

/**
 * Opaque undirected-graph handle.
 */
typedef struct DnGraph DnGraph;

/**
 * Outcome of a single attacker-defender game.
 */
typedef struct DnGameResult {
  /**
   * Probability that the attacker names every victim correctly, in [0, 1].
   */
  double success_probability;
  /**
   * Number of candidate sybil vectors retrieved.
   */
  uint64_t candidate_count;
  /**
   * Total fingerprint matchings across all candidates.
   */
  uint64_t matching_count;
  /**
   * 1 if a search cap trimmed candidates or matchings.
   */
  uint8_t truncated;
  /**
   * 1 if no candidate produced any matching.
   */
  uint8_t failed;
  /**
   * 1 if the wall-clock budget expired mid-run.
   */
  uint8_t timed_out;
  /**
   * 1 if the fingerprint pool made the run impossible.
   */
  uint8_t skipped;
  /**
   * 1 if there were no victims, making success vacuous.
   */
  uint8_t vacuous;
} DnGameResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static nul-terminated string.
 */
const char *dn_version(void);

/**
 * Message describing the most recent failure on this thread, or null if
 * no call has failed yet.
 */
const char *dn_last_error_message(void);

/**
 * Sample a graph on vertices 0..n where each pair is an edge independently
 * with probability `density`, and store a handle in `*out`.
 */
int dn_graph_random(uint32_t n, double density, uint64_t seed, struct DnGraph **out);

/**
 * Build a graph on vertices 0..n from `num_edges` endpoint pairs laid out
 * flat as u0, v0, u1, v1, ... Self-loops and duplicates are rejected.
 */
int dn_graph_from_edges(uint32_t n,
                        const uint32_t *endpoints,
                        size_t num_edges,
                        struct DnGraph **out);

/**
 * Parse a graph from an edge-list file (header "n m", then one "u v" line
 * per edge) and store a handle in `*out`.
 */
int dn_graph_read_edge_list(const char *path, struct DnGraph **out);

/**
 * Number of vertices, or 0 for a null handle.
 */
uint32_t dn_graph_num_vertices(const struct DnGraph *graph);

/**
 * Number of edges, or 0 for a null handle.
 */
uint64_t dn_graph_num_edges(const struct DnGraph *graph);

/**
 * Release a graph handle. Null is a no-op.
 */
void dn_graph_free(struct DnGraph *graph);

/**
 * Allocate a configuration with library defaults and store it in `*out`.
 */
int dn_config_new(struct DnConfig **out);

/**
 * Release a configuration handle. Null is a no-op.
 */
void dn_config_free(struct DnConfig *config);

/**
 * Set the order of each generated graph (before sybils are added).
 */
int dn_config_set_num_vertices(struct DnConfig *config, uint32_t n);

/**
 * Replace the density grid with `len` values from `densities`.
 */
int dn_config_set_densities(struct DnConfig *config, const double *densities, size_t len);

/**
 * Set how many graphs are sampled per density.
 */
int dn_config_set_graphs_per_density(struct DnConfig *config, uint32_t count);

/**
 * Set the number of sybil vertices the attacker plants.
 */
int dn_config_set_num_sybils(struct DnConfig *config, uint32_t count);

/**
 * Set the number of victims the attacker targets.
 */
int dn_config_set_num_victims(struct DnConfig *config, uint32_t count);

/**
 * Set the noise tolerances the robust variant plays with: `theta` bounds
 * retrieval dissimilarity, `beta` bounds fingerprint distance. The original
 * variant always plays (0, 0).
 */
int dn_config_set_tolerances(struct DnConfig *config, uint32_t theta, uint32_t beta);

/**
 * Choose the defender's perturbation: `DN_PERTURB_NONE` ignores `rate`,
 * `DN_PERTURB_RANDOM_FLIP` flips floor(rate * n(n-1)/2) random pairs.
 */
int dn_config_set_perturbation(struct DnConfig *config, int kind, double rate);

/**
 * Replace the variant list (reporting order) with `len` codes from
 * `variants`; each must be `DN_VARIANT_ORIGINAL` or `DN_VARIANT_ROBUST`.
 */
int dn_config_set_variants(struct DnConfig *config, const int *variants, size_t len);

/**
 * Set the master seed the experiment grid fans out from.
 */
int dn_config_set_seed(struct DnConfig *config, uint64_t seed);

/**
 * Set the per-run wall-clock budget in milliseconds; a breach scores the
 * run 0 and flags it.
 */
int dn_config_set_time_budget_ms(struct DnConfig *config, uint64_t millis);

/**
 * Cap retrieval's per-level surviving candidates; 0 removes the cap.
 */
int dn_config_set_frontier_cap(struct DnConfig *config, uint64_t cap);

/**
 * Cap simultaneously tracked matching assignments (must stay positive).
 */
int dn_config_set_partial_cap(struct DnConfig *config, uint64_t cap);

/**
 * Play one full game on `graph` under `config` with the given variant and
 * seed, writing the outcome into `*out`. The seed covers victim choice,
 * sybil construction, fingerprint assignment and the defender.
 */
int dn_run_game(const struct DnGraph *graph,
                const struct DnConfig *config,
                int variant,
                uint64_t seed,
                struct DnGameResult *out);

/**
 * Run the full experiment grid described by `config` and write the summary
 * CSV to `path`, overwriting any existing file.
 */
int dn_run_experiment_csv(const struct DnConfig *config, const char *path);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DEANON_H */
