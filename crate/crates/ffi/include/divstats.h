#ifndef DIVSTATS_H
#define DIVSTATS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DsAfdFlag {
  DS_AFD_FLAG_REGULAR = 0,
  DS_AFD_FLAG_ZERO_THRESHOLD = 1,
  /**
   * Outage is positive but the crossing rate underflows; the value is +inf.
   */
  DS_AFD_FLAG_UNBOUNDED = 2,
} DsAfdFlag;

typedef enum DsRegime {
  DS_REGIME_GENERAL = 0,
  DS_REGIME_INTERFERENCE_LIMITED = 1,
  DS_REGIME_NOISE_LIMITED = 2,
} DsRegime;

typedef enum DsStatistic {
  DS_STATISTIC_OUTAGE = 0,
  DS_STATISTIC_LCR = 1,
  DS_STATISTIC_AFD = 2,
  DS_STATISTIC_PDF = 3,
} DsStatistic;

typedef enum DsStatus {
  DS_STATUS_OK = 0,
  DS_STATUS_NULL_POINTER = 1,
  /**
   * The link parameters are invalid.
   */
  DS_STATUS_INVALID_CONFIG = 2,
  /**
   * An argument is outside the domain of the statistic.
   */
  DS_STATUS_DOMAIN = 3,
  /**
   * A series or integral did not converge.
   */
  DS_STATUS_NUMERICAL = 4,
  /**
   * Internal error; the call had no effect.
   */
  DS_STATUS_PANIC = 5,
} DsStatus;

/**
 * Opaque link handle.
 */
typedef struct DsLink DsLink;

/**
 * Link parameters; powers share one arbitrary unit, Dopplers are in Hz.
 */
typedef struct DsConfig {
  uint32_t m_s;
  uint32_t m_i;
  double omega_s;
  double omega_i;
  double sigma2;
  uint32_t n;
  double f_m0;
  double f_mi;
} DsConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Validates `config` and stores a new handle in `*out`.
 *
 * # Safety
 * `config` must point to a `DsConfig` and `out` to writable storage.
 */
enum DsStatus ds_link_new(const struct DsConfig *config, struct DsLink **out);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `link` must be null or a handle from `ds_link_new` not yet freed.
 */
void ds_link_free(struct DsLink *link);

/**
 * μ, c and the operating regime of the link. Any out-pointer may be null.
 *
 * # Safety
 * `link` must be a live handle; non-null out-pointers must be writable.
 */
enum DsStatus ds_link_derived(const struct DsLink *link,
                              double *mu,
                              double *c,
                              enum DsRegime *regime);

/**
 * One statistic at SINR threshold `z`: outage probability, crossing rate
 * (1/s), fade duration (s, +inf when unbounded) or SINR density.
 *
 * # Safety
 * `link` must be a live handle and `out` writable.
 */
enum DsStatus ds_eval(const struct DsLink *link, enum DsStatistic statistic, double z, double *out);

/**
 * Average fade duration at `z` with its boundary flag.
 *
 * # Safety
 * `link` must be a live handle; `out` and `flag` writable.
 */
enum DsStatus ds_afd(const struct DsLink *link, double z, double *out, enum DsAfdFlag *flag);

/**
 * Evaluates `statistic` at `len` thresholds. Points that fail are NaN in
 * `out` and the first failure's status is returned; the rest are filled.
 *
 * # Safety
 * `link` must be a live handle; `z` and `out` must hold `len` doubles.
 */
enum DsStatus ds_sweep(const struct DsLink *link,
                       enum DsStatistic statistic,
                       const double *z,
                       size_t len,
                       double *out);

/**
 * Message of the last failed call on this thread; empty after a success.
 * Valid until the next call on the same thread.
 */
const char *ds_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ds_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DIVSTATS_H */
