#ifndef SWINGBENCH_H
#define SWINGBENCH_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Output selector. `kappa` arguments are read only for `Combined`.
typedef enum SbOutput {
  SB_OUTPUT_PHASE = 0,
  SB_OUTPUT_EDGE_PHASE = 1,
  SB_OUTPUT_FREQUENCY = 2,
  SB_OUTPUT_COMBINED = 3,
} SbOutput;

// Result codes.
typedef enum SbStatus {
  SB_STATUS_OK = 0,
  SB_STATUS_NULL_POINTER = 1,
  SB_STATUS_INVALID_UTF8 = 2,
  SB_STATUS_PARSE_ERROR = 3,
  SB_STATUS_VALIDATION_ERROR = 4,
  SB_STATUS_DISCONNECTED_GRAPH = 5,
  SB_STATUS_NON_POSITIVE_PARAMETER = 6,
  SB_STATUS_INVALID_ARGUMENT = 7,
  SB_STATUS_NUMERICAL_ERROR = 8,
  SB_STATUS_NO_CLOSED_FORM = 9,
  SB_STATUS_BUFFER_TOO_SMALL = 10,
  SB_STATUS_PANIC = 11,
} SbStatus;

// Opaque model handle.
typedef struct SbModel SbModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Builds a model from a network JSON document.
//
// # Safety
// `json` must be a valid NUL-terminated string and `out` a writable pointer.
enum SbStatus sb_model_from_json(const char *json, struct SbModel **out);

// Builds a single-machine-infinite-bus model.
//
// # Safety
// `out` must be a writable pointer.
enum SbStatus sb_model_smib(double inertia, double damping, double b, struct SbModel **out);

// Returns a copy of `model` with new inertia and damping.
//
// # Safety
// `model` must be a live handle and `out` a writable pointer.
enum SbStatus sb_model_with_params(const struct SbModel *model,
                                   double inertia,
                                   double damping,
                                   struct SbModel **out);

// Releases a handle. Null is ignored.
//
// # Safety
// `model` must come from this library and not be used afterwards.
void sb_model_free(struct SbModel *model);

// Number of modes (nodes, or 1 for a single machine).
//
// # Safety
// `model` must be a live handle and `out` a writable pointer.
enum SbStatus sb_model_mode_count(const struct SbModel *model, size_t *out);

// Smallest nonzero Laplacian eigenvalue (or `B` for a single machine).
//
// # Safety
// `model` must be a live handle and `out` a writable pointer.
enum SbStatus sb_model_lambda2(const struct SbModel *model, double *out);

// Smallest modal damping ratio.
//
// # Safety
// `model` must be a live handle and `out` a writable pointer.
enum SbStatus sb_min_damping_ratio(const struct SbModel *model, double *out);

// Writes the `2 * mode_count` poles, two per mode, into `re` and `im`.
//
// # Safety
// `re` and `im` must each hold `len` doubles; `written` must be writable.
enum SbStatus sb_poles(const struct SbModel *model,
                       double *re,
                       double *im,
                       size_t len,
                       size_t *written);

// Closed-form H2 and H-infinity norms. Returns `NoClosedForm` for the
// combined output.
//
// # Safety
// `model` must be a live handle; `h2` and `hinf` writable pointers.
enum SbStatus sb_closed_form_norms(const struct SbModel *model,
                                   enum SbOutput output,
                                   double kappa,
                                   double *h2,
                                   double *hinf);

// H2 norm from the controllability/observability Gramian.
//
// # Safety
// `model` must be a live handle and `out` a writable pointer.
enum SbStatus sb_h2_oracle(const struct SbModel *model,
                           enum SbOutput output,
                           double kappa,
                           double *out);

// H-infinity norm by frequency search. `argmax` may be null.
//
// # Safety
// `model` must be a live handle and `out` a writable pointer.
enum SbStatus sb_hinf_oracle(const struct SbModel *model,
                             enum SbOutput output,
                             double kappa,
                             double rel_tol,
                             double *out,
                             double *argmax);

// Message of the last failed call on this thread. Valid until the next
// failing call on the same thread.
const char *sb_last_error_message(void);

// Static name of a status code.
const char *sb_status_name(enum SbStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SWINGBENCH_H */
