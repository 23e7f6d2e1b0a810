#ifndef SKETCHPARTS_H
#define SKETCHPARTS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SpCountMode {
  SP_COUNT_MODE_UNIQUE_BOUNDARY = 0,
  SP_COUNT_MODE_MATCHED_PIXELS = 1,
} SpCountMode;

typedef enum SpNormalization {
  SP_NORMALIZATION_MAX = 0,
  SP_NORMALIZATION_SUM = 1,
} SpNormalization;

// Result code of every exported function.
typedef enum SpStatus {
  SP_STATUS_OK = 0,
  SP_STATUS_NULL_POINTER = 1,
  SP_STATUS_INVALID_UTF8 = 2,
  SP_STATUS_IO = 3,
  SP_STATUS_PARSE = 4,
  SP_STATUS_VALIDATION = 5,
  SP_STATUS_EMPTY_DATASET = 6,
  SP_STATUS_OUT_OF_RANGE = 7,
  SP_STATUS_PANIC = 8,
} SpStatus;

typedef enum SpOrdering {
  SP_ORDERING_TEMPORAL = 0,
  SP_ORDERING_LENGTH = 1,
  SP_ORDERING_ALTERNATE = 2,
} SpOrdering;

// A loaded and validated dataset.
typedef struct SpDataset SpDataset;

// One category's importance report plus the warnings raised computing it.
typedef struct SpReport SpReport;

// Analysis parameters. Obtain defaults from [`sp_params_default`].
typedef struct SpParams {
  double epsilon;
  double dist_threshold;
  enum SpCountMode count_mode;
  enum SpNormalization normalization;
} SpParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread, or NULL if none.
// The pointer stays valid until the next failing call on this thread.
const char *sp_last_error_message(void);

// Releases a string returned by this library. NULL is ignored.
//
// # Safety
// `s` must come from this library and not have been freed already.
void sp_string_free(char *s);

struct SpParams sp_params_default(void);

// Loads and validates the dataset rooted at `root`.
//
// # Safety
// `root` must be a NUL-terminated string; `out` must be writable.
enum SpStatus sp_dataset_load(const char *root, struct SpDataset **out);

// # Safety
// `dataset` must be NULL or a handle from [`sp_dataset_load`] not yet freed.
void sp_dataset_free(struct SpDataset *dataset);

// # Safety
// `dataset` must be a live handle; `out` must be writable.
enum SpStatus sp_dataset_category_count(const struct SpDataset *dataset, uintptr_t *out);

// Writes a newly allocated copy of the category name to `out`.
//
// # Safety
// `dataset` must be a live handle; `out` must be writable.
enum SpStatus sp_dataset_category_name(const struct SpDataset *dataset,
                                       uintptr_t index,
                                       char **out);

// Scores one category. `params` may be NULL for the defaults.
//
// # Safety
// `dataset` must be a live handle; `params` NULL or readable; `out` writable.
enum SpStatus sp_analyze(const struct SpDataset *dataset,
                         uintptr_t category_index,
                         enum SpOrdering ordering,
                         const struct SpParams *params,
                         struct SpReport **out);

// # Safety
// `report` must be NULL or a handle from [`sp_analyze`] not yet freed.
void sp_report_free(struct SpReport *report);

// Number of parts in the report, in descending weight order.
//
// # Safety
// `report` must be a live handle; `out` writable.
enum SpStatus sp_report_len(const struct SpReport *report, uintptr_t *out);

// # Safety
// `report` must be a live handle; `out` writable.
enum SpStatus sp_report_part_name(const struct SpReport *report, uintptr_t index, char **out);

// # Safety
// `report` must be a live handle; `out` writable.
enum SpStatus sp_report_weight(const struct SpReport *report, uintptr_t index, double *out);

// The report formatted as one table row, without a trailing newline.
//
// # Safety
// `report` must be a live handle; `out` writable.
enum SpStatus sp_report_table_row(const struct SpReport *report, char **out);

// # Safety
// `report` must be a live handle; `out` writable.
enum SpStatus sp_report_warning_count(const struct SpReport *report, uintptr_t *out);

// # Safety
// `report` must be a live handle; `out` writable.
enum SpStatus sp_report_warning(const struct SpReport *report, uintptr_t index, char **out);

// Orders the strokes of one sketch file. The full length is always written
// to `out_len`; if it exceeds `capacity` nothing is copied and
// `SP_STATUS_OUT_OF_RANGE` is returned, so callers can size a buffer with a
// first call passing `capacity = 0`.
//
// # Safety
// `path` must be a NUL-terminated string, `out_ids` valid for `capacity`
// writes (or NULL when `capacity` is 0), and `out_len` writable.
enum SpStatus sp_order_strokes_file(const char *path,
                                    enum SpOrdering ordering,
                                    uint32_t *out_ids,
                                    uintptr_t capacity,
                                    uintptr_t *out_len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SKETCHPARTS_H */
