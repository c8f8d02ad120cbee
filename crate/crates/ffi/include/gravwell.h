#ifndef GRAVWELL_H
#define GRAVWELL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GwBoundary {
  GW_BOUNDARY_PERIODIC = 0,
  GW_BOUNDARY_NEUMANN = 1,
} GwBoundary;

typedef enum GwPotential {
  GW_POTENTIAL_ZERO = 0,
  /**
   * `(x - 1/2)^2 / 2`
   */
  GW_POTENTIAL_QUADRATIC = 1,
  /**
   * `sin x`
   */
  GW_POTENTIAL_SINE = 2,
  /**
   * `x`
   */
  GW_POTENTIAL_LINEAR = 3,
} GwPotential;

typedef enum GwScheme {
  GW_SCHEME_HLL = 0,
  GW_SCHEME_WB1 = 1,
  GW_SCHEME_WB2 = 2,
  GW_SCHEME_WB3 = 3,
} GwScheme;

/**
 * Result code of every fallible call.
 */
typedef enum GwStatus {
  GW_STATUS_OK = 0,
  GW_STATUS_NULL_POINTER = 1,
  GW_STATUS_INVALID_ARGUMENT = 2,
  GW_STATUS_NOT_ADMISSIBLE = 3,
  GW_STATUS_NO_EQUILIBRIUM = 4,
  GW_STATUS_NO_CONVERGENCE = 5,
  GW_STATUS_STEP_FAILURE = 6,
  GW_STATUS_CONFIG = 7,
  GW_STATUS_IO = 8,
  GW_STATUS_PANIC = 9,
} GwStatus;

/**
 * Opaque one-dimensional simulation.
 */
typedef struct GwSim1d GwSim1d;

/**
 * Output of the interface solver for one pair of states. Conserved states
 * are `(rho, q, E)`.
 */
typedef struct GwInterface {
  double lambda;
  double wl_star[3];
  double wr_star[3];
  double s_star;
  double source_q;
  double source_e;
  double flux[3];
} GwInterface;

/**
 * Parameters of a one-dimensional run.
 */
typedef struct GwSim1dParams {
  double x_min;
  double x_max;
  enum GwPotential potential;
  enum GwBoundary boundary;
  enum GwScheme scheme;
  double gamma;
  double cfl;
  /**
   * Multiplier on the wave-speed bound, at least 1.
   */
  double lambda_scale;
  double c_theta;
} GwSim1dParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next call into the library on the same thread.
 */
const char *gw_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *gw_version(void);

/**
 * Resolves the interface between `wl` and `wr` (each `rho, q, E`).
 *
 * # Safety
 * `wl`, `wr` must each point to three readable doubles, `out` to a writable
 * [`GwInterface`].
 */
enum GwStatus gw_interface_assemble(double gamma,
                                    double lambda_scale,
                                    const double *wl,
                                    const double *wr,
                                    double phi_l,
                                    double phi_r,
                                    double dx,
                                    struct GwInterface *out);

/**
 * Creates a one-dimensional run on `n` cells from the cell averages `rho`,
 * `q` and `energy`.
 *
 * # Safety
 * `params` must be readable, the three arrays must hold `n` doubles and
 * `out` must be writable.
 */
enum GwStatus gw_sim1d_create(const struct GwSim1dParams *params,
                              size_t n,
                              const double *rho,
                              const double *q,
                              const double *energy,
                              struct GwSim1d **out);

/**
 * Releases a run; null is ignored.
 *
 * # Safety
 * `sim` must come from [`gw_sim1d_create`] and not be used afterwards.
 */
void gw_sim1d_destroy(struct GwSim1d *sim);

/**
 * Advances by one step without passing `t_end`; the step size goes to `dt`
 * when it is not null.
 *
 * # Safety
 * `sim` must be a live handle; `dt` null or writable.
 */
enum GwStatus gw_sim1d_step(struct GwSim1d *sim, double t_end, double *dt);

/**
 * Steps until `t_final` is reached exactly.
 *
 * # Safety
 * `sim` must be a live handle.
 */
enum GwStatus gw_sim1d_advance(struct GwSim1d *sim, double t_final);

/**
 * Current time, or NaN for a null handle.
 *
 * # Safety
 * `sim` must be a live handle or null.
 */
double gw_sim1d_time(const struct GwSim1d *sim);

/**
 * Copies the `n` interior cell averages into the three arrays.
 *
 * # Safety
 * `sim` must be a live handle and each array must hold `n` writable doubles,
 * where `n` is the cell count given at creation.
 */
enum GwStatus gw_sim1d_state(const struct GwSim1d *sim,
                             size_t n,
                             double *rho,
                             double *q,
                             double *energy);

/**
 * Runs a configuration file as the `run` subcommand does. `output_dir` may
 * be null to keep the configured directory; `passed` receives 1 when every
 * threshold holds.
 *
 * # Safety
 * `config_path` must be a NUL-terminated string, `output_dir` null or
 * NUL-terminated, `passed` null or writable.
 */
enum GwStatus gw_run_config(const char *config_path, const char *output_dir, int32_t *passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GRAVWELL_H */
