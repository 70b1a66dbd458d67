#ifndef REGEN_H
#define REGEN_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call. Values 1 to 4 match the command-line
 * exit statuses.
 */
typedef enum RegenStatus {
  REGEN_STATUS_OK = 0,
  REGEN_STATUS_IO = 1,
  /**
   * A code failed its own checks.
   */
  REGEN_STATUS_VERIFICATION = 2,
  REGEN_STATUS_INPUT = 3,
  REGEN_STATUS_BUDGET = 4,
  REGEN_STATUS_NULL_POINTER = 5,
  /**
   * Output buffer has the wrong length.
   */
  REGEN_STATUS_BUFFER_SIZE = 6,
  REGEN_STATUS_PANIC = 7,
} RegenStatus;

/**
 * A built code.
 */
typedef struct RegenCode RegenCode;

/**
 * A verification report.
 */
typedef struct RegenReport RegenReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next call into the library on this thread; do not free.
 */
const char *regen_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 */
void regen_string_free(char *s);

/**
 * Builds the code described by `recipe`, e.g. `"blowup_full(base(3,2))"`.
 * `budget` caps the stored symbol count; 0 selects the default.
 */
enum RegenStatus regen_code_from_recipe(const char *recipe, size_t budget, struct RegenCode **out);

/**
 * Loads a code from its JSON description.
 */
enum RegenStatus regen_code_from_json(const char *json, struct RegenCode **out);

void regen_code_free(struct RegenCode *code);

/**
 * `(n, k, d)` of the code.
 */
enum RegenStatus regen_code_params(const struct RegenCode *code, size_t *n, size_t *k, size_t *d);

/**
 * Declared node size, repair bandwidth and file size, in symbols.
 */
enum RegenStatus regen_code_sizes(const struct RegenCode *code,
                                  size_t *alpha,
                                  size_t *gamma,
                                  size_t *file_len);

/**
 * Total number of symbols over all nodes; the length `regen_code_encode`
 * expects for its output.
 */
enum RegenStatus regen_code_total_symbols(const struct RegenCode *code, size_t *out);

/**
 * Encodes `msg` (file length symbols) and writes every node's content,
 * node 0 first, into `out`.
 */
enum RegenStatus regen_code_encode(const struct RegenCode *code,
                                   const uint16_t *msg,
                                   size_t msg_len,
                                   uint16_t *out,
                                   size_t out_len);

/**
 * JSON description of the code.
 */
enum RegenStatus regen_code_json(const struct RegenCode *code, char **out);

/**
 * Runs reconstruction and repair sweeps (exhaustive when small enough,
 * sampled with `seed` otherwise). A failing code still yields a report;
 * check it with `regen_report_passed`.
 */
enum RegenStatus regen_code_verify(const struct RegenCode *code,
                                   uint64_t seed,
                                   bool strict_basis,
                                   struct RegenReport **out);

void regen_report_free(struct RegenReport *report);

/**
 * False for a null report.
 */
bool regen_report_passed(const struct RegenReport *report);

enum RegenStatus regen_report_json(const struct RegenReport *report, char **out);

/**
 * Functional-repair capacity at `(alpha, gamma)`, as `"p/q"`.
 */
enum RegenStatus regen_capacity(size_t n,
                                size_t k,
                                size_t d,
                                const char *alpha,
                                const char *gamma,
                                char **out);

/**
 * Timesharing file size at `(alpha, gamma)`, as `"p/q"`.
 */
enum RegenStatus regen_timeshare(size_t n,
                                 size_t k,
                                 size_t d,
                                 const char *alpha,
                                 const char *gamma,
                                 char **out);

/**
 * Bandwidth and file size of the main construction at index `i`.
 */
enum RegenStatus regen_perf_p1(size_t n,
                               size_t k,
                               size_t d,
                               const char *alpha,
                               size_t i,
                               char **gamma_out,
                               char **file_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* REGEN_H */
