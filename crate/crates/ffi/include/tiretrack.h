#ifndef TIRETRACK_H
#define TIRETRACK_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TtStatus {
  TT_STATUS_OK = 0,
  TT_STATUS_NULL_POINTER = 1,
  TT_STATUS_INVALID_ARGUMENT = 2,
  TT_STATUS_NUMERICAL = 3,
  TT_STATUS_IO = 4,
  TT_STATUS_OUT_OF_RANGE = 5,
  TT_STATUS_PANIC = 6,
} TtStatus;

typedef enum TtKind {
  TT_KIND_ELLIPTIC = 0,
  TT_KIND_PARABOLIC = 1,
  TT_KIND_HYPERBOLIC = 2,
  TT_KIND_IDENTITY = 3,
} TtKind;

typedef enum TtStability {
  TT_STABILITY_STABLE = 0,
  TT_STABILITY_UNSTABLE = 1,
  TT_STABILITY_NEUTRAL = 2,
} TtStability;

/**
 * A sampled front track.
 */
typedef struct TtCurve TtCurve;

/**
 * Closed rear tracks of one front.
 */
typedef struct TtRears TtRears;

/**
 * Row-major `[[m11, m12], [m21, m22]]` with unit determinant.
 */
typedef struct TtMonodromy {
  double m[4];
  double trace;
  double abs_trace;
  double margin;
} TtMonodromy;

typedef struct TtRearInfo {
  enum TtStability stability;
  double alpha0;
  double multiplier;
  double signed_length;
  double closure;
  size_t cusps;
  int32_t maslov;
  size_t samples;
} TtRearInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Last error message on this thread, or null. Valid until the next failing
 * call on the same thread.
 */
const char *tt_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *tt_version(void);

/**
 * Build a curve from a JSON curve spec, e.g.
 * `{"variant":"circle","radius":2}`, at `density` samples per unit length.
 */
enum TtStatus tt_curve_from_json(const char *spec_json, size_t density, struct TtCurve **out);

void tt_curve_free(struct TtCurve *curve);

enum TtStatus tt_curve_length(const struct TtCurve *curve, double *out);

/**
 * Monodromy of a closed front. `step <= 0` selects the default step.
 */
enum TtStatus tt_monodromy(const struct TtCurve *curve,
                           double ell,
                           double step,
                           struct TtMonodromy *out,
                           enum TtKind *kind);

/**
 * Closed rear tracks: two when hyperbolic, one when parabolic, none when
 * elliptic.
 */
enum TtStatus tt_closed_rears(const struct TtCurve *curve,
                              double ell,
                              double step,
                              struct TtRears **out);

void tt_rears_free(struct TtRears *rears);

size_t tt_rears_count(const struct TtRears *rears);

enum TtStatus tt_rears_info(const struct TtRears *rears, size_t index, struct TtRearInfo *out);

/**
 * Copy up to `capacity` points of rear `index` into `xy` as interleaved
 * `x, y` pairs; `written` receives the number of points copied.
 */
enum TtStatus tt_rears_points(const struct TtRears *rears,
                              size_t index,
                              double *xy,
                              size_t capacity,
                              size_t *written);

/**
 * Run a full CLI config (JSON text) writing artifacts into `out_dir`.
 */
enum TtStatus tt_run_config(const char *config_json, const char *out_dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TIRETRACK_H */
