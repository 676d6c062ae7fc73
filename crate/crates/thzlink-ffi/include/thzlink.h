#ifndef THZLINK_H
#define THZLINK_H

/* Generated by cbindgen from thzlink-ffi; edit the Rust source instead. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum ThzStatus {
  THZ_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  THZ_STATUS_NULL_POINTER = 1,
  /**
   * An argument was outside its documented domain.
   */
  THZ_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The request is valid but cannot be met (for example no band wide
   * enough under the loss threshold).
   */
  THZ_STATUS_INFEASIBLE = 3,
  /**
   * A path argument was not valid UTF-8.
   */
  THZ_STATUS_UTF8 = 4,
  /**
   * Reading an input file failed.
   */
  THZ_STATUS_IO = 5,
  /**
   * A bug tripped an internal panic; the library state is still sound.
   */
  THZ_STATUS_INTERNAL = 6,
} ThzStatus;

/**
 * Opaque atmospheric-state handle.
 */
typedef struct ThzAtmosphere ThzAtmosphere;

/**
 * Opaque absorption model handle.
 */
typedef struct ThzModel ThzModel;

/**
 * Path-loss breakdown in dB.
 */
typedef struct ThzPathLoss {
  double spreading_db;
  double absorption_db;
  double total_db;
} ThzPathLoss;

/**
 * Radio front-end description; cone angles are full beamwidths in radians.
 */
typedef struct ThzHardware {
  double tx_power_dbm;
  double noise_figure_db;
  double system_temperature_k;
  double tx_beamwidth_rad;
  double rx_beamwidth_rad;
} ThzHardware;

/**
 * One transmission window on the scan grid.
 */
typedef struct ThzWindow {
  double f_low_hz;
  double f_high_hz;
  double worst_loss_db;
} ThzWindow;

/**
 * Beam-alignment summary over one simulated trajectory.
 */
typedef struct ThzAlignmentStats {
  double aligned_fraction;
  uint64_t outage_count;
  double mean_outage_duration_s;
} ThzAlignmentStats;

/**
 * Equal-hop repeater chain covering a corridor.
 */
typedef struct ThzBackhaulPlan {
  double hop_distance_m;
  uint64_t repeater_count;
  double per_hop_rate_bps;
  double band_center_hz;
  double band_bandwidth_hz;
} ThzBackhaulPlan;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *thz_version(void);

/**
 * Copies the calling thread's most recent error message into `buffer`
 * (NUL-terminated, truncated to `capacity`). Returns the full message length
 * in bytes, excluding the NUL; query with a null buffer to size one.
 */
size_t thz_last_error(char *buffer, size_t capacity);

/**
 * Creates an atmospheric state. Temperature in kelvin (200 to 330), pressure
 * in kPa, relative humidity in percent (0 to 100).
 */
enum ThzStatus thz_atmosphere_new(double temperature_k,
                                  double pressure_kpa,
                                  double relative_humidity_percent,
                                  struct ThzAtmosphere **out);

void thz_atmosphere_free(struct ThzAtmosphere *atmosphere);

/**
 * Creates the built-in nine-line water-vapor absorption model.
 */
enum ThzStatus thz_model_builtin(struct ThzModel **out);

/**
 * Loads spectral lines from a CSV with header `center_hz,strength,half_width_hz`.
 */
enum ThzStatus thz_model_from_lines_csv(const char *path,
                                        double continuum_np_per_m,
                                        double reference_vapor_density,
                                        struct ThzModel **out);

/**
 * Loads a coefficient lookup table from a CSV with header `frequency_hz,k_np_per_m`.
 */
enum ThzStatus thz_model_from_table_csv(const char *path,
                                        double reference_vapor_density,
                                        struct ThzModel **out);

void thz_model_free(struct ThzModel *model);

/**
 * Absorption coefficient in Np/m at `f_hz` under the given atmosphere.
 */
enum ThzStatus thz_absorption_coefficient(const struct ThzModel *model,
                                          const struct ThzAtmosphere *atmosphere,
                                          double f_hz,
                                          double *out);

/**
 * Free-space spreading loss in dB; pure function of frequency and distance.
 */
double thz_spreading_loss_db(double f_hz, double distance_m);

/**
 * Spreading plus absorption loss at `f_hz` over `distance_m`.
 */
enum ThzStatus thz_path_loss(const struct ThzModel *model,
                             const struct ThzAtmosphere *atmosphere,
                             double f_hz,
                             double distance_m,
                             struct ThzPathLoss *out);

/**
 * Linear gain of an ideal cone of full angle `beamwidth_rad` (0 to 2 pi).
 */
enum ThzStatus thz_gain_from_beamwidth(double beamwidth_rad, double *out);

/**
 * Thermal noise floor in dBm over `bandwidth_hz` plus the noise figure.
 */
enum ThzStatus thz_thermal_noise_dbm(double temperature_k,
                                     double bandwidth_hz,
                                     double noise_figure_db,
                                     double *out);

/**
 * Angle in radians between the rotated boresight and its nominal direction;
 * roll alone never moves it.
 */
double thz_boresight_offset(double yaw_rad, double pitch_rad, double roll_rad);

/**
 * Shannon capacity in bit/s of the band `center_hz` +- `bandwidth_hz`/2,
 * integrated in subchannels of `subchannel_width_hz`.
 */
enum ThzStatus thz_capacity_bps(const struct ThzModel *model,
                                const struct ThzAtmosphere *atmosphere,
                                const struct ThzHardware *hardware,
                                double center_hz,
                                double bandwidth_hz,
                                double distance_m,
                                double subchannel_width_hz,
                                double *out);

/**
 * Scans `f_low_hz..f_high_hz` in `step_hz` steps for windows whose total
 * loss at `distance_m` stays at or below `loss_threshold_db`. Writes up to
 * `capacity` windows into `out_windows` and always stores the total count in
 * `out_count`; call with capacity 0 to size a buffer.
 */
enum ThzStatus thz_find_windows(const struct ThzModel *model,
                                const struct ThzAtmosphere *atmosphere,
                                double distance_m,
                                double f_low_hz,
                                double f_high_hz,
                                double step_hz,
                                double loss_threshold_db,
                                struct ThzWindow *out_windows,
                                size_t capacity,
                                size_t *out_count);

/**
 * Simulates one orientation trajectory of the named mobility class ("s1",
 * "s2", "s3", or "static") and reports how well a cone of `beamwidth_rad`
 * stays aligned when re-alignment takes `realign_latency_s`.
 */
enum ThzStatus thz_alignment_stats(const char *class_name,
                                   uint64_t seed,
                                   double beamwidth_rad,
                                   double realign_latency_s,
                                   double duration_s,
                                   double timestep_s,
                                   struct ThzAlignmentStats *out);

/**
 * Plans the minimal equal-hop repeater chain across `total_distance_m` so
 * every hop carries `required_rate_bps` in some band of
 * `required_bandwidth_hz` under the scan's loss threshold.
 */
enum ThzStatus thz_plan_backhaul(const struct ThzModel *model,
                                 const struct ThzAtmosphere *atmosphere,
                                 const struct ThzHardware *hardware,
                                 double f_low_hz,
                                 double f_high_hz,
                                 double step_hz,
                                 double loss_threshold_db,
                                 double subchannel_width_hz,
                                 double total_distance_m,
                                 double required_rate_bps,
                                 double required_bandwidth_hz,
                                 struct ThzBackhaulPlan *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* THZLINK_H */
