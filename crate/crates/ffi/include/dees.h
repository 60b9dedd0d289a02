#ifndef DEES_H
#define DEES_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DeesStatus {
  DEES_STATUS_OK = 0,
  DEES_STATUS_NULL_POINTER = 1,
  DEES_STATUS_INVALID_INPUT = 2,
  /**
   * Normalization refused: no absolute-convergence certificate or the
   * total mass is not 1.
   */
  DEES_STATUS_UNCERTIFIED = 3,
  DEES_STATUS_NUMERICAL = 4,
  /**
   * A Rust panic was caught at the boundary.
   */
  DEES_STATUS_PANIC = 5,
} DeesStatus;

typedef struct DeesAutomaton DeesAutomaton;

typedef struct DeesNormalized DeesNormalized;

typedef struct DeesSample DeesSample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or NULL if none. The caller
 * frees the string with [`dees_string_free`].
 */
char *dees_last_error_message(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, not yet freed.
 */
void dees_string_free(char *s);

/**
 * Parses an automaton JSON document.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum DeesStatus dees_automaton_from_json(const char *json, struct DeesAutomaton **out);

/**
 * Builds a named fixture (`dirac`, `half_loop`, `two_state_pda`,
 * `a_alpha(α;λ0,λ1,λ2)`).
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum DeesStatus dees_automaton_fixture(const char *name, struct DeesAutomaton **out);

/**
 * # Safety
 * `a` must be a live handle; `out` must be writable.
 */
enum DeesStatus dees_automaton_to_json(const struct DeesAutomaton *a, char **out);

/**
 * # Safety
 * `a` must be a live handle; `out` must be writable.
 */
enum DeesStatus dees_automaton_state_count(const struct DeesAutomaton *a, size_t *out);

/**
 * `r(w)` as a double (rational automata are evaluated exactly, then
 * rounded).
 *
 * # Safety
 * `a` must be a live handle, `word` a NUL-terminated string, `out` writable.
 */
enum DeesStatus dees_automaton_eval(const struct DeesAutomaton *a, const char *word, double *out);

/**
 * # Safety
 * `a` must be NULL or a handle not yet freed.
 */
void dees_automaton_free(struct DeesAutomaton *a);

/**
 * Draws `n` words from a probabilistic automaton.
 *
 * # Safety
 * `a` must be a live handle; `out` must be writable.
 */
enum DeesStatus dees_sample_draw(const struct DeesAutomaton *a,
                                 size_t n,
                                 uint64_t seed,
                                 struct DeesSample **out);

/**
 * Parses a sample in text format (`#alphabet:` header, one word per line).
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum DeesStatus dees_sample_from_text(const char *text, struct DeesSample **out);

/**
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum DeesStatus dees_sample_to_text(const struct DeesSample *s, char **out);

/**
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum DeesStatus dees_sample_len(const struct DeesSample *s, size_t *out);

/**
 * # Safety
 * `s` must be NULL or a handle not yet freed.
 */
void dees_sample_free(struct DeesSample *s);

/**
 * Learns a floating automaton with DEES at tolerance `|S|^eps_exponent`
 * (the usual choice is `-1/3`).
 *
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum DeesStatus dees_learn(const struct DeesSample *s,
                           double eps_exponent,
                           struct DeesAutomaton **out);

/**
 * Rounds the parameters of an automaton learned from `n` words. `complete`
 * (optional) receives whether every parameter was recovered, in which case
 * the result is rational.
 *
 * # Safety
 * `a` must be a live handle; `out` must be writable; `complete` may be NULL.
 */
enum DeesStatus dees_exactify(const struct DeesAutomaton *a,
                              size_t n,
                              struct DeesAutomaton **out,
                              bool *complete);

/**
 * Normalizes a copy of `a`; fails with `Uncertified` when the series is not
 * certified absolutely convergent with total mass 1.
 *
 * # Safety
 * `a` must be a live handle; `out` must be writable.
 */
enum DeesStatus dees_normalized_new(const struct DeesAutomaton *a, struct DeesNormalized **out);

/**
 * `p_r(w)`.
 *
 * # Safety
 * `ns` must be a live handle, `word` a NUL-terminated string, `out` writable.
 */
enum DeesStatus dees_normalized_eval(const struct DeesNormalized *ns,
                                     const char *word,
                                     double *out);

/**
 * Draws `n` words from `p_r`.
 *
 * # Safety
 * `ns` must be a live handle; `out` must be writable.
 */
enum DeesStatus dees_normalized_sample(const struct DeesNormalized *ns,
                                       size_t n,
                                       uint64_t seed,
                                       struct DeesSample **out);

/**
 * # Safety
 * `ns` must be NULL or a handle not yet freed.
 */
void dees_normalized_free(struct DeesNormalized *ns);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DEES_H */
