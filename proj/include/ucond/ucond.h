/* C interface to the ucond simulator. Every handle is opaque and owned by the
 * caller once returned; free it with the matching *_free function. Functions
 * returning ucond_status leave a message in ucond_last_error() on failure
 * (thread-local, valid until the next failing call on the same thread). */
#ifndef UCOND_UCOND_H
#define UCOND_UCOND_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(UCOND_BUILDING_LIBRARY)
#    define UCOND_API __declspec(dllexport)
#  else
#    define UCOND_API __declspec(dllimport)
#  endif
#else
#  define UCOND_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ucond_status {
    UCOND_OK = 0,
    UCOND_E_NULL = 1,            /* required pointer argument was NULL */
    UCOND_E_INPUT = 2,           /* bad argument value */
    UCOND_E_CONFIG = 3,          /* scenario parse or validation failure */
    UCOND_E_NOT_IMPLEMENTED = 4, /* descriptor-only topology */
    UCOND_E_SINGULAR = 5,
    UCOND_E_STEP = 6,
    UCOND_E_RUN = 7,             /* run aborted after every dt halving */
    UCOND_E_MEASUREMENT = 8,     /* metric or channel unavailable */
    UCOND_E_CONTRACT = 9,
    UCOND_E_IO = 10,
    UCOND_E_RANGE = 11,          /* index out of range */
    UCOND_E_INTERNAL = 12
} ucond_status;

typedef struct ucond_scenario ucond_scenario;
typedef struct ucond_result ucond_result;
typedef struct ucond_sweep ucond_sweep;

UCOND_API const char* ucond_version(void);
UCOND_API const char* ucond_last_error(void);
UCOND_API const char* ucond_status_name(ucond_status status);
/* Process exit code for a status: 0 ok, 2 configuration, 1 otherwise. */
UCOND_API int ucond_exit_code(ucond_status status);

/* ---- scenarios ---- */
UCOND_API ucond_status ucond_scenario_default(ucond_scenario** out);
UCOND_API ucond_status ucond_scenario_parse(const char* json_text, ucond_scenario** out);
UCOND_API ucond_status ucond_scenario_load(const char* path, ucond_scenario** out);
UCOND_API ucond_status ucond_scenario_clone(const ucond_scenario* s, ucond_scenario** out);
UCOND_API void ucond_scenario_free(ucond_scenario* s);

/* Numeric keys use dotted names ("source.v_ll_peak"); booleans are 0/1. */
UCOND_API ucond_status ucond_scenario_set(ucond_scenario* s, const char* key, double value);
UCOND_API ucond_status ucond_scenario_get(const ucond_scenario* s, const char* key, double* value);
UCOND_API ucond_status ucond_scenario_set_topology(ucond_scenario* s, const char* name);
UCOND_API const char* ucond_scenario_topology(const ucond_scenario* s);
UCOND_API ucond_status ucond_scenario_validate(const ucond_scenario* s);
UCOND_API size_t ucond_scenario_key_count(void);
UCOND_API const char* ucond_scenario_key_name(size_t index);

/* ---- single runs ---- */
UCOND_API ucond_status ucond_run(const ucond_scenario* s, ucond_result** out);
UCOND_API void ucond_result_free(ucond_result* r);

UCOND_API size_t ucond_result_metric_count(const ucond_result* r);
UCOND_API ucond_status ucond_result_metric_at(const ucond_result* r, size_t index, const char** name,
                                              double* value);
UCOND_API ucond_status ucond_result_metric(const ucond_result* r, const char* name, double* value);

UCOND_API size_t ucond_result_sample_count(const ucond_result* r);
UCOND_API size_t ucond_result_channel_count(const ucond_result* r);
UCOND_API const char* ucond_result_channel_name(const ucond_result* r, size_t index);
/* Borrowed pointer, valid while the result lives. "time" selects the grid. */
UCOND_API ucond_status ucond_result_channel(const ucond_result* r, const char* name, const double** data,
                                            size_t* length);

UCOND_API size_t ucond_result_event_count(const ucond_result* r);
UCOND_API ucond_status ucond_result_event(const ucond_result* r, size_t index, double* t, const char** mode);

UCOND_API size_t ucond_result_warning_count(const ucond_result* r);
UCOND_API const char* ucond_result_warning(const ucond_result* r, size_t index);

/* channels: comma-separated names, NULL or "" for all. */
UCOND_API ucond_status ucond_result_export_trace_csv(const ucond_result* r, const char* path,
                                                     const char* channels);
UCOND_API ucond_status ucond_result_export_summary_csv(const ucond_result* r, const char* path);

/* ---- sweeps ---- */
/* A failing run lands in its row; the sweep itself only fails on bad input.
 * threads = 0 uses the hardware concurrency. */
#define UCOND_SWEEP_KEEP_TRACES 1u
UCOND_API ucond_status ucond_sweep_run(const ucond_scenario* base, const char* axis, const double* values,
                                       size_t count, unsigned threads, unsigned flags, ucond_sweep** out);
UCOND_API void ucond_sweep_free(ucond_sweep* sw);
UCOND_API size_t ucond_sweep_row_count(const ucond_sweep* sw);
UCOND_API ucond_status ucond_sweep_row_value(const ucond_sweep* sw, size_t row, double* value);
/* UCOND_OK for a successful row, otherwise the status the run failed with. */
UCOND_API ucond_status ucond_sweep_row_status(const ucond_sweep* sw, size_t row);
UCOND_API const char* ucond_sweep_row_error(const ucond_sweep* sw, size_t row);
UCOND_API ucond_status ucond_sweep_metric(const ucond_sweep* sw, size_t row, const char* name, double* value);
UCOND_API ucond_status ucond_sweep_export_csv(const ucond_sweep* sw, const char* path);
/* Needs UCOND_SWEEP_KEEP_TRACES and a successful row. */
UCOND_API ucond_status ucond_sweep_export_trace_csv(const ucond_sweep* sw, size_t row, const char* path,
                                                    const char* channels);

/* ---- topology taxonomy ---- */
UCOND_API size_t ucond_topology_count(void);
UCOND_API ucond_status ucond_topology_info(size_t index, const char** name, const char** title,
                                           const char** summary, int* simulated);

#ifdef __cplusplus
}
#endif

#endif
