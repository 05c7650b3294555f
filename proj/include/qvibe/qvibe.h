#ifndef QVIBE_QVIBE_H
#define QVIBE_QVIBE_H

/* C interface to the qvibe library: scenario handling, batch commands and
 * timestamp-stream access through opaque handles. Every call returns a
 * qvibe_status; on failure qvibe_last_error() describes the problem (the
 * message is per thread and valid until the next failing call). */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define QVIBE_API __declspec(dllexport)
#else
#define QVIBE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qvibe_status {
  QVIBE_OK = 0,
  QVIBE_ERR_USAGE = 1,    /* bad arguments to the API itself (null handle, bad enum) */
  QVIBE_ERR_CONFIG = 2,   /* invalid scenario or parameters */
  QVIBE_ERR_IO = 3,       /* unreadable or unwritable files, malformed streams */
  QVIBE_ERR_ANALYSIS = 4, /* numerical failure in the estimation pipeline */
  QVIBE_ERR_INTERNAL = 5
} qvibe_status;

typedef struct qvibe_scenario qvibe_scenario;
typedef struct qvibe_stream qvibe_stream;

QVIBE_API const char* qvibe_version(void);
QVIBE_API const char* qvibe_last_error(void);
QVIBE_API const char* qvibe_status_name(qvibe_status status);

/* Scenarios. */
QVIBE_API qvibe_status qvibe_scenario_new(qvibe_scenario** out);
QVIBE_API qvibe_status qvibe_scenario_load(const char* path, qvibe_scenario** out);
/* INI text, or JSON when the first non-blank character is '{'. */
QVIBE_API qvibe_status qvibe_scenario_parse(const char* text, qvibe_scenario** out);
/* key is "section.key", value as written in a scenario file ("10 nm"). */
QVIBE_API qvibe_status qvibe_scenario_set(qvibe_scenario* scenario, const char* key, const char* value);
QVIBE_API qvibe_status qvibe_scenario_validate(const qvibe_scenario* scenario);
QVIBE_API void qvibe_scenario_free(qvibe_scenario* scenario);

/* Commands. Reports go to the scenario's run.out directory. The summary text
 * is copied into summary (truncated to capacity - 1 and NUL terminated) when
 * summary is non-null; summary_needed, when non-null, receives the full length
 * plus one. */
QVIBE_API qvibe_status qvibe_run_simulate(const qvibe_scenario* scenario, char* summary, size_t capacity,
                                          size_t* summary_needed);
QVIBE_API qvibe_status qvibe_run_estimate(const qvibe_scenario* scenario, const char* first_path,
                                          const char* second_path, char* summary, size_t capacity,
                                          size_t* summary_needed);
QVIBE_API qvibe_status qvibe_run_trials(const qvibe_scenario* scenario, char* summary, size_t capacity,
                                        size_t* summary_needed);
QVIBE_API qvibe_status qvibe_run_sweep(const qvibe_scenario* scenario, char* summary, size_t capacity,
                                       size_t* summary_needed);
QVIBE_API qvibe_status qvibe_run_advantage(const qvibe_scenario* scenario, char* summary, size_t capacity,
                                           size_t* summary_needed);
QVIBE_API qvibe_status qvibe_run_qcrb(const qvibe_scenario* scenario, char* summary, size_t capacity,
                                      size_t* summary_needed);

/* Lower bound on the delay standard deviation (s) for n_pairs detected pairs,
 * detuning and bandwidth given as ordinary frequencies in Hz. */
QVIBE_API qvibe_status qvibe_qcrb_delay_std(double n_pairs, double detuning_hz, double bandwidth_hz,
                                            double* out_seconds);

/* Timestamp streams. */
typedef enum qvibe_window { QVIBE_WINDOW_HANN = 0, QVIBE_WINDOW_RECTANGULAR = 1 } qvibe_window;

QVIBE_API qvibe_status qvibe_stream_read(const char* path, qvibe_stream** out);
/* binary != 0 writes the binary format, otherwise text. */
QVIBE_API qvibe_status qvibe_stream_write(const qvibe_stream* stream, const char* path, int binary);
QVIBE_API qvibe_status qvibe_stream_count(const qvibe_stream* stream, size_t* out);
QVIBE_API qvibe_status qvibe_stream_exposure(const qvibe_stream* stream, double* out_seconds);
QVIBE_API qvibe_status qvibe_stream_tick_ps(const qvibe_stream* stream, uint64_t* out);
/* (1/t_exp) sum_i w(T_i') exp(-i 2 pi f T_i') with T_i' centred on the exposure. */
QVIBE_API qvibe_status qvibe_stream_project(const qvibe_stream* stream, double frequency_hz, qvibe_window window,
                                            double* out_re, double* out_im);
QVIBE_API void qvibe_stream_free(qvibe_stream* stream);

#ifdef __cplusplus
}
#endif

#endif /* QVIBE_QVIBE_H */
