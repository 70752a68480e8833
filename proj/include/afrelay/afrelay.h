#ifndef AFRELAY_AFRELAY_H
#define AFRELAY_AFRELAY_H

#include <stddef.h>
#include <stdint.h>

#if defined(AFRELAY_BUILDING_LIBRARY)
#define AFR_API __attribute__((visibility("default")))
#else
#define AFR_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Increments on any incompatible change to this header. */
#define AFR_ABI_VERSION 1
/* Increments when a CSV column is added, removed or reinterpreted. */
#define AFR_CSV_SCHEMA_VERSION 1

typedef enum afr_status {
  AFR_OK = 0,
  AFR_ERR_INVALID_ARGUMENT = 1, /* null handle, bad index, contract violation */
  AFR_ERR_DIMENSION = 2,
  AFR_ERR_NUMERICAL = 3,
  AFR_ERR_SINGULAR = 4,
  AFR_ERR_IDENTIFIABILITY = 5,
  AFR_ERR_INFEASIBLE = 6,
  AFR_ERR_VALIDATION = 7,
  AFR_ERR_UNKNOWN_KEY = 8,
  AFR_ERR_IO = 9,
  AFR_ERR_BUFFER_TOO_SMALL = 10,
  AFR_ERR_INTERNAL = 11
} afr_status;

AFR_API int afr_abi_version(void);
AFR_API int afr_csv_schema_version(void);
AFR_API const char* afr_status_name(afr_status status);
/* Message of the last failing call on this thread; "" when none. */
AFR_API const char* afr_last_error(void);

/*
 * Strings are returned through (buffer, capacity, needed). `needed` receives
 * the length including the terminating NUL. When capacity is too small the
 * call returns AFR_ERR_BUFFER_TOO_SMALL and writes nothing; a null buffer with
 * capacity 0 is a valid size query.
 */

/* ------------------------------------------------------------------ config */

typedef struct afr_config afr_config;

AFR_API afr_status afr_config_create(afr_config** out);
AFR_API void afr_config_destroy(afr_config* config);
AFR_API afr_status afr_config_copy(const afr_config* config, afr_config** out);
AFR_API afr_status afr_config_set(afr_config* config, const char* key, const char* value);
AFR_API afr_status afr_config_get(const afr_config* config, const char* key, char* buffer, size_t capacity,
                                  size_t* needed);
/* `key = value` lines, '#' comments. */
AFR_API afr_status afr_config_parse(afr_config* config, const char* text);
AFR_API afr_status afr_config_load(afr_config* config, const char* path);
AFR_API afr_status afr_config_validate(const afr_config* config);
AFR_API size_t afr_config_key_count(void);
/* Null when index is out of range. */
AFR_API const char* afr_config_key_name(size_t index);

/* ---------------------------------------------------------------- solution */

typedef struct afr_solution afr_solution;

typedef struct afr_solution_info {
  int subcarriers;
  double total_power;    /* P_r */
  double power_sum;      /* sum of per-subcarrier powers */
  double gamma;          /* multiplier of the allocation step */
  char requested[16];    /* variant names */
  char applied[16];
  int hsa_votes;
  int spa_votes;
  double analytic_mse;   /* total over subcarriers, evaluated with the true error moments */
  double power_residual; /* max relative gap between deployed relay power and its budget */
} afr_solution_info;

typedef struct afr_subcarrier_summary {
  double power;
  double gamma;
  double eta;
  int active_modes;
} afr_subcarrier_summary;

/* Draws the channels and estimates of `trial` and designs the relay and destination. */
AFR_API afr_status afr_solve(const afr_config* config, uint64_t trial, afr_solution** out);
AFR_API void afr_solution_destroy(afr_solution* solution);
AFR_API afr_status afr_solution_info_get(const afr_solution* solution, afr_solution_info* out);
AFR_API afr_status afr_solution_subcarrier(const afr_solution* solution, int subcarrier, afr_subcarrier_summary* out);
/* Header `subcarrier,power,gamma,eta,active_modes,lambda_f,lambda_g`. */
AFR_API afr_status afr_solution_csv(const afr_solution* solution, char* buffer, size_t capacity, size_t* needed);
AFR_API afr_status afr_solution_write_csv(const afr_solution* solution, const char* path);

/* Error moments of one hop ("sr" or "rd") under the configuration, header `matrix,subcarrier,row,col,re,im`. */
AFR_API afr_status afr_moments_write_csv(const afr_config* config, const char* hop, const char* path);

/* ------------------------------------------------------------------ series */

typedef struct afr_series afr_series;

typedef struct afr_point {
  double value;
  double mse_mean;
  double mse_stderr;
  double ber_mean;
  double ber_stderr;
  double analytic_mean;
  double analytic_stderr;
  int trials;
  int infeasible;
} afr_point;

/* Monte Carlo over the configured sweep axis; one series labelled by the variant. */
AFR_API afr_status afr_sweep(const afr_config* config, afr_series** out);
/*
 * Preset of a figure. `keys`/`values` (count entries) override every series
 * after the preset is applied.
 */
AFR_API afr_status afr_figure(int number, const char* const* keys, const char* const* values, size_t count,
                              afr_series** out);
AFR_API void afr_series_destroy(afr_series* series);
/* "mse" or "ber" for figures, "" for sweeps. */
AFR_API const char* afr_series_metric(const afr_series* series);
AFR_API size_t afr_series_count(const afr_series* series);
/* Valid while the handle lives; null on a bad index. */
AFR_API const char* afr_series_label(const afr_series* series, size_t index);
AFR_API const char* afr_series_axis(const afr_series* series, size_t index);
AFR_API size_t afr_series_points(const afr_series* series, size_t index);
AFR_API afr_status afr_series_point(const afr_series* series, size_t index, size_t point, afr_point* out);
/* Header `axis,value,mse_mean,mse_stderr,ber_mean,ber_stderr,trials,variant`. */
AFR_API afr_status afr_series_csv(const afr_series* series, char* buffer, size_t capacity, size_t* needed);
AFR_API afr_status afr_series_write_csv(const afr_series* series, const char* path);

/* ------------------------------------------------------------------ checks */

typedef struct afr_check_report afr_check_report;

typedef struct afr_check_item {
  const char* name;   /* valid while the report lives */
  double measured;
  double tolerance;   /* +inf for reported-only items */
  int passed;
  const char* detail;
} afr_check_item;

AFR_API size_t afr_check_suite_count(void);
AFR_API const char* afr_check_suite_name(size_t index);
/* `suite` is a suite name or "all"; seed 0 keeps the default. */
AFR_API afr_status afr_check_run(const char* suite, uint64_t seed, afr_check_report** out);
AFR_API void afr_check_destroy(afr_check_report* report);
AFR_API size_t afr_check_count(const afr_check_report* report);
AFR_API afr_status afr_check_item_get(const afr_check_report* report, size_t index, afr_check_item* out);
AFR_API int afr_check_all_passed(const afr_check_report* report);

#ifdef __cplusplus
}
#endif

#endif
