#ifndef SUPENV_SUPENV_H
#define SUPENV_SUPENV_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SUPENV_BUILDING)
#    define SUPENV_API __declspec(dllexport)
#  else
#    define SUPENV_API __declspec(dllimport)
#  endif
#else
#  define SUPENV_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum supenv_status {
    SUPENV_OK = 0,
    SUPENV_INVALID_ARGUMENT = 1,
    SUPENV_PARSE_ERROR = 2,
    SUPENV_EVAL_ERROR = 3,
    SUPENV_DOMAIN_ERROR = 4,
    SUPENV_IO_ERROR = 5,
    SUPENV_INTERNAL_ERROR = 6
} supenv_status;

typedef struct supenv_function supenv_function;
typedef struct supenv_report supenv_report;

/* Axis-aligned box; only the first `dim` entries of each array are read. */
typedef struct supenv_box {
    int dim;
    double lo[2];
    double hi[2];
    int nodes[2];
} supenv_box;

typedef struct supenv_envelope_options {
    int refine_depth;   /* default 3 */
    int approach_depth; /* 0 = automatic */
    double far_field;   /* 1 = the box is the universe */
} supenv_envelope_options;

/* Message of the last failed call on this thread, "" if none. */
SUPENV_API const char* supenv_last_error(void);
SUPENV_API const char* supenv_version(void);
SUPENV_API const char* supenv_status_name(supenv_status status);

/* Worker threads for sampling loops; 0 restores the default. */
SUPENV_API supenv_status supenv_set_threads(int threads);

SUPENV_API void supenv_envelope_options_default(supenv_envelope_options* options);

/* Functions ---------------------------------------------------------------- */

SUPENV_API supenv_status supenv_function_parse(const char* source, const char* name, supenv_function** out);
/* A battery entry with its default box and options (either may be NULL). */
SUPENV_API supenv_status supenv_function_battery(const char* name, supenv_function** out, supenv_box* box,
                                                 supenv_envelope_options* options);
SUPENV_API void supenv_function_free(supenv_function* fn);
SUPENV_API int supenv_function_dim(const supenv_function* fn);
/* Canonical expression text, owned by the handle. */
SUPENV_API const char* supenv_function_expression(const supenv_function* fn);
/* +inf is reported as HUGE_VAL. */
SUPENV_API supenv_status supenv_function_eval(const supenv_function* fn, const double* point, double* value);

SUPENV_API size_t supenv_battery_size(void);
SUPENV_API const char* supenv_battery_name(size_t index);

/* Runs ------------------------------------------------------------------------
 * Every run returns a report handle holding the CSV and JSON renderings and
 * a pass flag (the run's own assertions). options may be NULL. */

SUPENV_API supenv_status supenv_run_envelope(const supenv_function* fn, const supenv_box* box,
                                             const supenv_envelope_options* options, supenv_report** out);
SUPENV_API supenv_status supenv_run_sweep_p(const supenv_function* fn, const supenv_box* box,
                                            const supenv_envelope_options* options, const double* p, size_t p_count,
                                            supenv_report** out);
SUPENV_API supenv_status supenv_run_gamma_min(const supenv_function* fn, double a, double b, int intervals,
                                              double slope_lo, double slope_hi, int slope_count, const double* p,
                                              size_t p_count, supenv_report** out);
SUPENV_API supenv_status supenv_run_recover(double c_lo, double c_hi, double xi, int n, supenv_report** out);
SUPENV_API supenv_status supenv_run_check_h(const supenv_function* fn, const supenv_box* box, const double* probes,
                                            size_t probe_count, supenv_report** out);
SUPENV_API supenv_status supenv_run_falsify(const supenv_function* fn, double xi, uint64_t seed, int trials,
                                            supenv_report** out);
/* Golden comparison plus property suite for every battery entry. */
SUPENV_API supenv_status supenv_run_battery(const char* golden_dir, int update, supenv_report** out);

/* Reports ------------------------------------------------------------------ */

SUPENV_API int supenv_report_passed(const supenv_report* report);
/* Borrowed strings, valid until supenv_report_free. */
SUPENV_API const char* supenv_report_json(const supenv_report* report);
SUPENV_API const char* supenv_report_csv(const supenv_report* report);
/* Human-readable one-screen summary. */
SUPENV_API const char* supenv_report_summary(const supenv_report* report);
/* format: "csv" or "json". */
SUPENV_API supenv_status supenv_report_write(const supenv_report* report, const char* path, const char* format);
SUPENV_API void supenv_report_free(supenv_report* report);

#ifdef __cplusplus
}
#endif

#endif
