/* Copyright 2026 The qss Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

     http://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License. */

/*
 * C interface of the qss shared library.
 *
 * Every call returns a qss_status. On failure, qss_last_error() gives a
 * message for the calling thread, valid until that thread's next call.
 * Strings handed out by the library are released with qss_string_free.
 */
#ifndef QSS_QSS_H
#define QSS_QSS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(QSS_BUILDING_LIBRARY)
#    define QSS_API __declspec(dllexport)
#  else
#    define QSS_API __declspec(dllimport)
#  endif
#else
#  define QSS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qss_status {
    QSS_OK = 0,
    QSS_ERR_INVALID_ARGUMENT = 1,
    QSS_ERR_DIMENSION = 2,
    QSS_ERR_CONFIG = 3,
    QSS_ERR_IO = 4,
    QSS_ERR_PROTOCOL = 5,
    QSS_ERR_INTERNAL = 6
} qss_status;

/* Parsed run configuration. */
typedef struct qss_spec qss_spec;
/* Result of a batch of trials. */
typedef struct qss_report qss_report;

QSS_API const char *qss_version(void);
QSS_API const char *qss_last_error(void);
QSS_API void qss_string_free(char *s);

QSS_API qss_status qss_spec_load(const char *path, qss_spec **out);
QSS_API qss_status qss_spec_parse(const char *yaml_text, qss_spec **out);
QSS_API void qss_spec_free(qss_spec *spec);

QSS_API qss_status qss_spec_set_seed(qss_spec *spec, uint64_t seed);
QSS_API qss_status qss_spec_set_trials(qss_spec *spec, uint64_t trials);
QSS_API qss_status qss_spec_set_threads(qss_spec *spec, unsigned threads);
/* NULL leaves a path unchanged; "" clears it. */
QSS_API qss_status qss_spec_set_outputs(qss_spec *spec, const char *stats_path,
                                        const char *transcript_path);
/* Output paths currently set (borrowed; valid while the spec lives). */
QSS_API const char *qss_spec_stats_path(const qss_spec *spec);
QSS_API const char *qss_spec_transcript_path(const qss_spec *spec);

/* Runs every trial. A trial error still yields a report, flagged
 * incomplete; the status is then QSS_ERR_PROTOCOL (or the error's code). */
QSS_API qss_status qss_run(const qss_spec *spec, qss_report **out);
QSS_API void qss_report_free(qss_report *report);

QSS_API uint64_t qss_report_trials_run(const qss_report *report);
QSS_API uint64_t qss_report_aborted_trials(const qss_report *report);
QSS_API int qss_report_incomplete(const qss_report *report);
/* Stats document as JSON; free with qss_string_free. */
QSS_API qss_status qss_report_stats_json(const qss_report *report, char **out);
/* Writes the spec's stats and transcript files (skipping empty paths). */
QSS_API qss_status qss_report_write(const qss_report *report, const qss_spec *spec);

/* Oracle predictions as JSON; free with qss_string_free. */
QSS_API qss_status qss_oracle(const qss_spec *spec, char **out);
/* Transcript of one trial, header included; free with qss_string_free. */
QSS_API qss_status qss_replay(const qss_spec *spec, uint64_t trial, char **out);

#ifdef __cplusplus
}
#endif

#endif /* QSS_QSS_H */
