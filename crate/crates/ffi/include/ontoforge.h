#ifndef ONTOFORGE_H
#define ONTOFORGE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum OntoStatus {
  ONTO_STATUS_OK = 0,
  ONTO_STATUS_NULL_POINTER = 1,
  ONTO_STATUS_INVALID_UTF8 = 2,
  ONTO_STATUS_IO = 3,
  ONTO_STATUS_PARSE = 4,
  ONTO_STATUS_INVALID = 5,
  ONTO_STATUS_DEPENDENCY = 6,
  ONTO_STATUS_DATA = 7,
  ONTO_STATUS_PANIC = 8,
} OntoStatus;

/**
 * Pipeline bound to one configuration and output directory.
 */
typedef struct OntoPipeline OntoPipeline;

/**
 * Loaded hit-count snapshot.
 */
typedef struct OntoSnapshot OntoSnapshot;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *onto_last_error(void);

/**
 * Library version as a static string.
 */
const char *onto_version(void);

/**
 * Frees a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void onto_string_free(char *s);

/**
 * Levenshtein distance between two UTF-8 strings, in characters.
 *
 * # Safety
 * `a` and `b` must be nul-terminated; `out` must be writable.
 */
enum OntoStatus onto_edit_distance(const char *a, const char *b, uintptr_t *out);

/**
 * Loads a hit-count snapshot from a JSON file.
 *
 * # Safety
 * `path` must be nul-terminated; `out` must be writable.
 */
enum OntoStatus onto_snapshot_load(const char *path, struct OntoSnapshot **out);

/**
 * Parses a hit-count snapshot from JSON text.
 *
 * # Safety
 * `json` must be nul-terminated; `out` must be writable.
 */
enum OntoStatus onto_snapshot_from_json(const char *json, struct OntoSnapshot **out);

/**
 * NGD between two terms under the snapshot's counts.
 *
 * # Safety
 * `snapshot` must be a live handle; `x`, `y` nul-terminated; `out` writable.
 */
enum OntoStatus onto_snapshot_ngd(const struct OntoSnapshot *snapshot,
                                  const char *x,
                                  const char *y,
                                  double *out);

/**
 * # Safety
 * `snapshot` must come from this library and not have been freed. Null is
 * ignored.
 */
void onto_snapshot_free(struct OntoSnapshot *snapshot);

/**
 * Opens a pipeline from a JSON config file. `out_dir` may be null to keep
 * the configured directory.
 *
 * # Safety
 * `config_path` (and `out_dir` when not null) must be nul-terminated; `out`
 * must be writable.
 */
enum OntoStatus onto_pipeline_open(const char *config_path,
                                   const char *out_dir,
                                   struct OntoPipeline **out);

/**
 * Sets the seed used by later phases.
 *
 * # Safety
 * `pipeline` must be a live handle.
 */
enum OntoStatus onto_pipeline_set_seed(struct OntoPipeline *pipeline, uint64_t seed);

/**
 * Runs one phase by name (`ingest`, `clean`, `frames`, `terms`, `cluster`,
 * `ontology`, `eval`) or every phase for `run-all`.
 *
 * # Safety
 * `pipeline` must be a live handle; `phase` nul-terminated.
 */
enum OntoStatus onto_pipeline_run(struct OntoPipeline *pipeline, const char *phase);

/**
 * # Safety
 * `pipeline` must come from this library and not have been freed. Null is
 * ignored.
 */
void onto_pipeline_free(struct OntoPipeline *pipeline);

/**
 * Extracts frames from one CoNLL-U document and returns them as JSON
 * lines. Chunking statistics come from the document itself.
 *
 * # Safety
 * `conllu` must be nul-terminated; `out_jsonl` must be writable. The result
 * is freed with `onto_string_free`.
 */
enum OntoStatus onto_extract_frames_conllu(const char *conllu, char **out_jsonl);

/**
 * Clusters a distance matrix given in the `distances.tsv` format with
 * default parameters and `seed`, returning the tree as JSON.
 *
 * # Safety
 * `tsv` must be nul-terminated; `out_json` must be writable. The result is
 * freed with `onto_string_free`.
 */
enum OntoStatus onto_cluster_tsv(const char *tsv, uint64_t seed, char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ONTOFORGE_H */
