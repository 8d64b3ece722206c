#ifndef DISFIX_H
#define DISFIX_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum DisfixStatus {
  DISFIX_STATUS_OK = 0,
  DISFIX_STATUS_NULL_POINTER = 1,
  DISFIX_STATUS_INVALID_UTF8 = 2,
  DISFIX_STATUS_UNSUPPORTED_LANGUAGE = 3,
  DISFIX_STATUS_INVALID_CONFIG = 4,
  DISFIX_STATUS_ENGINE_FAILURE = 5,
  DISFIX_STATUS_PANIC = 6,
} DisfixStatus;

/**
 * Disfluency kinds, including `Fluent` for utterances with none.
 */
typedef enum DisfixType {
  DISFIX_TYPE_FILLER = 0,
  DISFIX_TYPE_REPETITION = 1,
  DISFIX_TYPE_CORRECTION = 2,
  DISFIX_TYPE_FALSE_START = 3,
  DISFIX_TYPE_FLUENT = 4,
  /**
   * Returned by accessors given a null result.
   */
  DISFIX_TYPE_INVALID = -1,
} DisfixType;

/**
 * A configured engine. Immutable, so one handle may be shared across threads.
 */
typedef struct DisfixEngine DisfixEngine;

/**
 * The outcome of one correction.
 */
typedef struct DisfixResult DisfixResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates an engine with the built-in English and Hindi lexicons.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum DisfixStatus disfix_engine_new(struct DisfixEngine **out);

/**
 * Creates an engine from a lexicon directory laid out as
 * `<dir>/<lang>/fillers.txt` and `<dir>/<lang>/editing_terms.txt`.
 * A null `dir` selects the built-in lexicons. A nonzero
 * `ambiguous_fillers` also treats words like "like" and "well" as fillers.
 *
 * # Safety
 * `dir` must be null or a NUL-terminated string; `out` must be writable.
 */
enum DisfixStatus disfix_engine_new_with_options(const char *dir,
                                                 int32_t ambiguous_fillers,
                                                 struct DisfixEngine **out);

/**
 * Releases an engine. Null is ignored.
 *
 * # Safety
 * `engine` must be null or a handle from `disfix_engine_new*` not yet freed.
 */
void disfix_engine_free(struct DisfixEngine *engine);

/**
 * Corrects one utterance. `lang` is a language code such as `"en"` or `"hi"`.
 *
 * # Safety
 * `engine` must be a live handle, `text` and `lang` NUL-terminated strings,
 * and `out` writable.
 */
enum DisfixStatus disfix_correct(const struct DisfixEngine *engine,
                                 const char *text,
                                 const char *lang,
                                 struct DisfixResult **out);

/**
 * Releases a result. Null is ignored.
 *
 * # Safety
 * `result` must be null or a handle from [`disfix_correct`] not yet freed.
 */
void disfix_result_free(struct DisfixResult *result);

/**
 * The corrected text, borrowed from `result`. Null when `result` is null.
 *
 * # Safety
 * `result` must be null or a live result handle.
 */
const char *disfix_result_fluent_text(const struct DisfixResult *result);

/**
 * The full correction as a JSON object, borrowed from `result`.
 *
 * # Safety
 * `result` must be null or a live result handle.
 */
const char *disfix_result_json(const struct DisfixResult *result);

/**
 * Number of disfluent words removed. Zero when `result` is null.
 *
 * # Safety
 * `result` must be null or a live result handle.
 */
size_t disfix_result_disfluency_count(const struct DisfixResult *result);

/**
 * The utterance's dominant disfluency kind.
 *
 * # Safety
 * `result` must be null or a live result handle.
 */
enum DisfixType disfix_result_utterance_type(const struct DisfixResult *result);

/**
 * Disfluent words of one kind. Zero for `Fluent`, `Invalid` or a null result.
 *
 * # Safety
 * `result` must be null or a live result handle.
 */
size_t disfix_result_type_count(const struct DisfixResult *result, enum DisfixType kind);

/**
 * Number of disfluent spans found.
 *
 * # Safety
 * `result` must be null or a live result handle.
 */
size_t disfix_result_span_count(const struct DisfixResult *result);

/**
 * The message for the last failure on this thread, or null after a
 * success. Valid until the next call into this library on the same thread.
 */
const char *disfix_last_error(void);

/**
 * The library version as a static string.
 */
const char *disfix_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DISFIX_H */
