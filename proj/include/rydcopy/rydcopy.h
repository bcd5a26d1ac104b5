#ifndef RYDCOPY_RYDCOPY_H
#define RYDCOPY_RYDCOPY_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(RYDCOPY_BUILDING_LIBRARY)
#define RYDCOPY_API __declspec(dllexport)
#else
#define RYDCOPY_API __declspec(dllimport)
#endif
#else
#define RYDCOPY_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rydcopy_status {
  RYDCOPY_OK = 0,
  RYDCOPY_ERR_INVALID_ARGUMENT = 1,
  RYDCOPY_ERR_CONFIG = 2,
  RYDCOPY_ERR_NUMERICAL = 3,
  RYDCOPY_ERR_IO = 4,
  RYDCOPY_ERR_VALIDATION_FAILED = 5,
  RYDCOPY_ERR_INTERNAL = 6
} rydcopy_status;

typedef struct rydcopy_config rydcopy_config;
typedef struct rydcopy_result rydcopy_result;

RYDCOPY_API const char* rydcopy_version(void);
/* Message for the last failed call on this thread; empty if none. */
RYDCOPY_API const char* rydcopy_last_error(void);
RYDCOPY_API const char* rydcopy_status_string(rydcopy_status status);

RYDCOPY_API rydcopy_status rydcopy_config_default(rydcopy_config** out);
RYDCOPY_API rydcopy_status rydcopy_config_load(const char* path, rydcopy_config** out);
RYDCOPY_API rydcopy_status rydcopy_config_from_json(const char* json_text, rydcopy_config** out);
RYDCOPY_API void rydcopy_config_free(rydcopy_config* config);
RYDCOPY_API rydcopy_status rydcopy_config_set_seed(rydcopy_config* config, uint64_t seed);
RYDCOPY_API rydcopy_status rydcopy_config_set_output_dir(rydcopy_config* config, const char* dir);
RYDCOPY_API rydcopy_status rydcopy_config_set_trajectories(rydcopy_config* config, size_t count);
RYDCOPY_API rydcopy_status rydcopy_config_set_workers(rydcopy_config* config, size_t count);
/* Caller frees *out with rydcopy_string_free. */
RYDCOPY_API rydcopy_status rydcopy_config_to_json(const rydcopy_config* config, char** out);
RYDCOPY_API rydcopy_status rydcopy_config_hash(const rydcopy_config* config, char** out);
RYDCOPY_API void rydcopy_string_free(char* s);

/* Runs one of: gate-time-table, gate-sweep, readout-curve, min-time, validate.
   A failed validation still returns a result, with status RYDCOPY_ERR_VALIDATION_FAILED. */
RYDCOPY_API rydcopy_status rydcopy_run(const rydcopy_config* config, const char* command, rydcopy_result** out);
/* Writes CSV files and the JSON sidecar into the configured output directory. */
RYDCOPY_API rydcopy_status rydcopy_result_write(const rydcopy_result* result, const rydcopy_config* config);
RYDCOPY_API size_t rydcopy_result_table_count(const rydcopy_result* result);
RYDCOPY_API const char* rydcopy_result_table_name(const rydcopy_result* result, size_t index);
/* CSV text of a table, including the metadata header. */
RYDCOPY_API const char* rydcopy_result_table_csv(const rydcopy_result* result, size_t index);
RYDCOPY_API const char* rydcopy_result_summary_json(const rydcopy_result* result);
RYDCOPY_API int rydcopy_result_passed(const rydcopy_result* result);
RYDCOPY_API size_t rydcopy_result_file_count(const rydcopy_result* result);
RYDCOPY_API const char* rydcopy_result_file_path(const rydcopy_result* result, size_t index);
RYDCOPY_API void rydcopy_result_free(rydcopy_result* result);

/* Gate times in microseconds for Omega/2pi = omega_mhz. envelope: "square" or "shaped". */
RYDCOPY_API rydcopy_status rydcopy_gate_time(size_t n_ancillae, double omega_mhz, const char* envelope, double* out);
RYDCOPY_API rydcopy_status rydcopy_exact_gate_time(size_t n_ancillae, double omega_rad_per_us, double* out);
RYDCOPY_API rydcopy_status rydcopy_approx_gate_time(size_t n_ancillae, double omega_rad_per_us, double* out);

/* 1/2 - 1/4 sum |p0 - p1| over length-count arrays. */
RYDCOPY_API rydcopy_status rydcopy_gate_infidelity(const double* p0, const double* p1, size_t count, double* out);

typedef struct rydcopy_readout_params {
  double t_photon_us;
  double t_bg_us;
  double t_loss_us;
  double t_meas_us;
  double dt_us;
  double detection_fraction;
} rydcopy_readout_params;

RYDCOPY_API void rydcopy_readout_params_default(rydcopy_readout_params* out);
/* Aggregated-count measurement infidelity for excitation distributions p0, p1 over 0..N. */
RYDCOPY_API rydcopy_status rydcopy_measurement_infidelity(const double* p0, const double* p1, size_t count,
                                                          const rydcopy_readout_params* params, double* out);

#ifdef __cplusplus
}
#endif

#endif
