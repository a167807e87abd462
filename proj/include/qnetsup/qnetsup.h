/* Copyright 2026 The qnetsup Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface of libqnetsup. Handles are opaque; every call that can fail
 * returns a qns_status and leaves a message for qns_last_error() on the
 * calling thread. */

#ifndef QNETSUP_QNETSUP_H_
#define QNETSUP_QNETSUP_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(QNETSUP_BUILDING)
#define QNS_API __declspec(dllexport)
#else
#define QNS_API __declspec(dllimport)
#endif
#else
#define QNS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values 1..13 mirror qnetsup::ErrorCode. */
typedef enum qns_status {
  QNS_OK = 0,
  QNS_INVALID_ARGUMENT = 1,
  QNS_DUPLICATE_REGISTER = 2,
  QNS_UNKNOWN_REGISTER = 3,
  QNS_INDEX_OUT_OF_RANGE = 4,
  QNS_DIMENSION_MISMATCH = 5,
  QNS_NOT_UNITARY = 6,
  QNS_INCOMPLETE_MEASUREMENT = 7,
  QNS_ZERO_PROBABILITY = 8,
  QNS_WEIGHT_DRIFT = 9,
  QNS_NOT_ORTHOGONAL = 10,
  QNS_PRECONDITION_FAILED = 11,
  QNS_CONFIG = 12,
  QNS_SIZE_LIMIT = 13,
  QNS_INTERNAL = 100
} qns_status;

typedef struct qns_report qns_report;
typedef struct qns_state qns_state;

typedef struct qns_options {
  uint64_t seed;
  int sample; /* 0: post-selected outcomes, 1: sampled */
  int reps;   /* redraws per logged distribution in sample mode */
  int draws;  /* extra random weight/input draws */
  int sweep;  /* 1: rerun every single-outcome deviation */
  int timing; /* 1: include wall_time_ms in the JSON */
} qns_options;

QNS_API const char* qns_version(void);
/* Message of the last failing call on this thread ("" if none). */
QNS_API const char* qns_last_error(void);
QNS_API const char* qns_status_name(qns_status s);

QNS_API void qns_default_options(qns_options* opts);

QNS_API int qns_scenario_count(void);
/* NULL when i is out of range. */
QNS_API const char* qns_scenario_name(int i);

/* opts may be NULL for defaults. */
QNS_API qns_status qns_run_scenario(const char* name, const qns_options* opts,
                                    qns_report** out);
/* Every scenario in registry order; JSON is {"all_pass":..,"reports":[..]}. */
QNS_API qns_status qns_run_all(const qns_options* opts, qns_report** out);
QNS_API qns_status qns_run_topology(const char* json_text, const qns_options* opts,
                                    qns_report** out);

/* The string lives as long as the report. */
QNS_API const char* qns_report_json(const qns_report* r);
QNS_API int qns_report_passed(const qns_report* r);
QNS_API int qns_report_count(const qns_report* r);
QNS_API const char* qns_report_scenario(const qns_report* r, int i);
QNS_API int qns_report_scenario_passed(const qns_report* r, int i);
QNS_API int qns_report_check_count(const qns_report* r, int i);
QNS_API void qns_report_free(qns_report* r);

/* ---- state vectors ---- */

/* |0...0> over the given registers. seed drives sampled measurements. */
QNS_API qns_status qns_state_new(int n, const char* const* labels, const int* dims,
                                 uint64_t seed, qns_state** out);
QNS_API void qns_state_free(qns_state* s);
QNS_API size_t qns_state_dimension(const qns_state* s);
QNS_API int qns_state_register_count(const qns_state* s);
/* Interleaved (re, im) pairs, 2*dimension doubles, normalized on entry. */
QNS_API qns_status qns_state_set_amplitudes(qns_state* s, const double* re_im, size_t n);
QNS_API qns_status qns_state_amplitudes(const qns_state* s, double* re_im, size_t n);
/* Row-major interleaved matrix of side `dim`, dim = product of target dims. */
QNS_API qns_status qns_state_apply(qns_state* s, int n_targets,
                                   const char* const* targets, const double* re_im,
                                   int dim);
/* outcome_in >= 0 post-selects, -1 samples. The register is removed. */
QNS_API qns_status qns_state_measure_z(qns_state* s, const char* label, int outcome_in,
                                       int* outcome, double* probability);
QNS_API qns_status qns_state_negativity(const qns_state* s, int n_side_a,
                                        const char* const* side_a, double* out);

#ifdef __cplusplus
}
#endif

#endif /* QNETSUP_QNETSUP_H_ */
