#ifndef MEN_H
#define MEN_H

#include <stddef.h>
#include <stdint.h>

/**
 * Tripartite class tag.
 */
typedef enum MenClass {
  MEN_CLASS_FULLY_SEPARABLE = 0,
  MEN_CLASS_BISEPARABLE = 1,
  MEN_CLASS_W_LIKE = 2,
  MEN_CLASS_GHZ_LIKE = 3,
} MenClass;

/**
 * Result code of every fallible call.
 */
typedef enum MenStatus {
  MEN_STATUS_OK = 0,
  MEN_STATUS_NULL_POINTER = 1,
  MEN_STATUS_INVALID_ARGUMENT = 2,
  MEN_STATUS_BUFFER_TOO_SMALL = 3,
  MEN_STATUS_PANIC = 4,
  MEN_STATUS_MISSING_BINDING = 10,
  MEN_STATUS_INVALID_PARTITION = 11,
  MEN_STATUS_INVALID_UNITARY = 12,
  MEN_STATUS_ZERO_PROBABILITY_OUTCOME = 13,
  MEN_STATUS_NOT_SEPARABLE = 14,
  MEN_STATUS_DEGENERATE_STATE = 15,
  MEN_STATUS_ZERO_REFERENCE_AMPLITUDE = 16,
  MEN_STATUS_ZERO_AMPLITUDE = 17,
  MEN_STATUS_INCONSISTENT_GRAPH = 18,
  MEN_STATUS_ENUMERATION_BOUND_EXCEEDED = 19,
  MEN_STATUS_INVALID_QUERY = 20,
  MEN_STATUS_ZERO_EVIDENCE_PROBABILITY = 21,
  MEN_STATUS_NOT_A_CHAIN = 22,
  MEN_STATUS_NOT_A_PREFIX = 23,
  MEN_STATUS_WRONG_ARITY = 24,
  MEN_STATUS_ALL_BASES_REJECTED = 25,
  MEN_STATUS_INVALID_STATE = 26,
  MEN_STATUS_INVALID_MODEL = 27,
  MEN_STATUS_FORMAT = 28,
  MEN_STATUS_IO = 29,
} MenStatus;

/**
 * Opaque network model.
 */
typedef struct MenModel MenModel;

/**
 * Opaque pure state.
 */
typedef struct MenState MenState;

/**
 * Numerical thresholds; see [`men_tolerance_default`].
 */
typedef struct MenTolerance {
  double rel_eps;
  double abs_eps;
  double zero_amp_threshold;
} MenTolerance;

/**
 * Value and operation count of a query.
 */
typedef struct MenQuery {
  double value;
  double ln_value;
  uint64_t op_count;
} MenQuery;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *men_version(void);

/**
 * Message of the last failed call on this thread, or an empty string.
 * The pointer stays valid until the next call on the same thread.
 */
const char *men_last_error_message(void);

struct MenTolerance men_tolerance_default(void);

/**
 * Builds a state from `2^n` real and imaginary parts in index order.
 * The vector must have unit norm within `1e-6`; larger drift than `1e-9`
 * is renormalized.
 *
 * # Safety
 * `re` and `im` must point to `len` readable doubles; `out` must be writable.
 */
enum MenStatus men_state_new(size_t n,
                             const double *re,
                             const double *im,
                             size_t len,
                             struct MenState **out);

/**
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum MenStatus men_state_load(const char *path, struct MenState **out);

/**
 * # Safety
 * `state` must be a live handle; `path` a NUL-terminated string.
 */
enum MenStatus men_state_save(const struct MenState *state, const char *path);

/**
 * Number of qubits, or 0 for a NULL handle.
 *
 * # Safety
 * `state` must be NULL or a live handle.
 */
size_t men_state_num_qubits(const struct MenState *state);

/**
 * Copies the `2^n` amplitudes into `re` and `im`, each of capacity `cap`.
 *
 * # Safety
 * `re` and `im` must point to `cap` writable doubles.
 */
enum MenStatus men_state_amplitudes(const struct MenState *state,
                                    double *re,
                                    double *im,
                                    size_t cap);

/**
 * # Safety
 * `state` must be NULL or a handle not yet freed.
 */
void men_state_free(struct MenState *state);

/**
 * Edges of the robust network graph as `(i, j)` pairs with `i < j`,
 * flattened into `edges` (capacity `cap` pairs). `count` receives the
 * number of edges even when the buffer is too small. `tol` may be NULL.
 *
 * # Safety
 * `edges` must point to `2 * cap` writable values; `count` must be writable.
 */
enum MenStatus men_state_graph(const struct MenState *state,
                               const struct MenTolerance *tol,
                               uint32_t *edges,
                               size_t cap,
                               size_t *count);

/**
 * Extracts the network model of a state with no near-zero amplitudes.
 *
 * # Safety
 * `state` must be a live handle; `tol` may be NULL; `out` must be writable.
 */
enum MenStatus men_extract(const struct MenState *state,
                           const struct MenTolerance *tol,
                           struct MenModel **out);

/**
 * Rebuilds the normalized state of a model.
 *
 * # Safety
 * `model` must be a live handle; `out` must be writable.
 */
enum MenStatus men_reconstruct(const struct MenModel *model, struct MenState **out);

/**
 * Random nonzero model on the chain `1 - 2 - ... - n`.
 *
 * # Safety
 * `out` must be writable.
 */
enum MenStatus men_random_chain_model(size_t n, uint64_t seed, struct MenModel **out);

/**
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum MenStatus men_model_load(const char *path, struct MenModel **out);

/**
 * # Safety
 * `model` must be a live handle; `path` a NUL-terminated string.
 */
enum MenStatus men_model_save(const struct MenModel *model, const char *path);

/**
 * Number of qubits, or 0 for a NULL handle.
 *
 * # Safety
 * `model` must be NULL or a live handle.
 */
size_t men_model_num_qubits(const struct MenModel *model);

/**
 * 1 if the model graph is the chain `1 - 2 - ... - n`, else 0.
 *
 * # Safety
 * `model` must be NULL or a live handle.
 */
int32_t men_model_is_chain(const struct MenModel *model);

/**
 * # Safety
 * `model` must be NULL or a handle not yet freed.
 */
void men_model_free(struct MenModel *model);

/**
 * `p(x_M) / p(x0)` for the partial assignment `qubits[k] = bits[k]`.
 * Chains take the linear-time path; other graphs are enumerated.
 *
 * # Safety
 * `qubits` and `bits` must point to `len` readable values; `out` must be
 * writable.
 */
enum MenStatus men_marginal_ratio(const struct MenModel *model,
                                  const uint32_t *qubits,
                                  const uint8_t *bits,
                                  size_t len,
                                  struct MenQuery *out);

/**
 * `p(query | evidence)`; either assignment may be empty.
 *
 * # Safety
 * Each array must hold its stated number of readable values; `out` must be
 * writable.
 */
enum MenStatus men_conditional_probability(const struct MenModel *model,
                                           const uint32_t *query_qubits,
                                           const uint8_t *query_bits,
                                           size_t query_len,
                                           const uint32_t *evidence_qubits,
                                           const uint8_t *evidence_bits,
                                           size_t evidence_len,
                                           double *out);

/**
 * Most likely basis assignment. `bits` receives `n` values, qubit 1 first.
 *
 * # Safety
 * `bits` must point to `cap` writable bytes; `probability` must be writable.
 */
enum MenStatus men_mle(const struct MenModel *model,
                       uint8_t *bits,
                       size_t cap,
                       double *probability);

/**
 * Classifies a three-qubit state. For `Biseparable`, `qubit` receives the
 * qubit that factors out; otherwise 0.
 *
 * # Safety
 * `state` must be a live handle; `tol` may be NULL; `class` and `qubit`
 * must be writable.
 */
enum MenStatus men_classify(const struct MenState *state,
                            size_t samples,
                            uint64_t seed,
                            const struct MenTolerance *tol,
                            enum MenClass *class_,
                            uint32_t *qubit);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MEN_H */
