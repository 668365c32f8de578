#ifndef MWDKIT_H
#define MWDKIT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum MwdStatus {
  MWD_STATUS_OK = 0,
  MWD_STATUS_NULL_POINTER = 1,
  MWD_STATUS_INVALID_ARGUMENT = 2,
  MWD_STATUS_CONFIG = 3,
  MWD_STATUS_SINGULAR = 4,
  MWD_STATUS_GRID_MISMATCH = 5,
  MWD_STATUS_NUMERICAL = 6,
  MWD_STATUS_PANIC = 7,
  MWD_STATUS_BUFFER_TOO_SMALL = 8,
} MwdStatus;

typedef struct MwdField MwdField;

typedef struct MwdGrid MwdGrid;

typedef struct MwdMatrix MwdMatrix;

typedef struct MwdOperator MwdOperator;

typedef struct MwdSignal MwdSignal;

typedef struct MwdSymbol MwdSymbol;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message into `buf` (NUL-terminated,
 * truncated to `cap - 1` bytes). Returns the full message length.
 */
size_t mwd_last_error(char *buf, size_t cap);

/**
 * Library version as a static NUL-terminated string.
 */
const char *mwd_version(void);

/**
 * Named matrix in dimension `d`. `param` is τ for `"tau"` and the scalar
 * `c` of `M = cI` / `T = cI` for `"cohen"` / `"affine"`; otherwise ignored.
 */
enum MwdStatus mwd_matrix_preset(const char *name, double param, size_t d, struct MwdMatrix **out);

/**
 * `2d × 2d` matrix from row-major `entries` (`4 d²` doubles).
 */
enum MwdStatus mwd_matrix_from_entries(const double *entries, size_t d, struct MwdMatrix **out);

/**
 * Matrix from the same JSON object accepted by the CLI's `matrix` field.
 */
enum MwdStatus mwd_matrix_from_json(const char *json_text, size_t d, struct MwdMatrix **out);

enum MwdStatus mwd_matrix_det(const struct MwdMatrix *m, double *out);

void mwd_matrix_free(struct MwdMatrix *m);

/**
 * Grid of `n` points (a power of two) per axis over `[-len/2, len/2)^dim`.
 */
enum MwdStatus mwd_grid_new(size_t dim, size_t n, double len, struct MwdGrid **out);

/**
 * Number of grid points, `n^dim`; 0 for a null grid.
 */
size_t mwd_grid_total(const struct MwdGrid *g);

void mwd_grid_free(struct MwdGrid *g);

/**
 * Signal from a JSON object as in the CLI's `signals` list.
 */
enum MwdStatus mwd_signal_from_json(const char *json_text, size_t d, struct MwdSignal **out);

/**
 * Samples on `grid` into `out` (`2 * total` doubles).
 */
enum MwdStatus mwd_signal_sample(const struct MwdSignal *s,
                                 const struct MwdGrid *grid,
                                 double *out,
                                 size_t cap);

void mwd_signal_free(struct MwdSignal *s);

/**
 * `B_A(f, g)` on `grid`; `g` may be null for `B_A(f, f)`.
 */
enum MwdStatus mwd_transform(const struct MwdMatrix *a,
                             const struct MwdSignal *f,
                             const struct MwdSignal *g,
                             const struct MwdGrid *grid,
                             struct MwdField **out);

/**
 * Number of complex values in the field, `n^(2 dim)`, ordered with `x` outer.
 */
size_t mwd_field_len(const struct MwdField *f);

enum MwdStatus mwd_field_copy(const struct MwdField *f, double *out, size_t cap);

void mwd_field_free(struct MwdField *f);

/**
 * Symbol sampled on `grid` and its dual, from a JSON object as in the CLI's
 * `symbol` field. Relative `file` paths resolve against the working directory.
 */
enum MwdStatus mwd_symbol_from_json(const char *json_text,
                                    const struct MwdGrid *grid,
                                    struct MwdSymbol **out);

void mwd_symbol_free(struct MwdSymbol *s);

/**
 * Kernel of the operator with symbol `sigma` under the matrix `a`.
 */
enum MwdStatus mwd_operator_from_symbol(const struct MwdSymbol *sigma,
                                        const struct MwdMatrix *a,
                                        struct MwdOperator **out);

/**
 * Applies the operator to `n` interleaved complex samples; `out` needs `2n` doubles.
 */
enum MwdStatus mwd_operator_apply(const struct MwdOperator *op,
                                  const double *input,
                                  size_t n,
                                  double *out,
                                  size_t cap);

void mwd_operator_free(struct MwdOperator *op);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MWDKIT_H */
