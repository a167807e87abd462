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

/* Plain C client of the shared library. */

#include <math.h>
#include <stdio.h>
#include <string.h>

#include "qnetsup/qnetsup.h"

static int failed = 0;

#define EXPECT(cond)                                               \
  do {                                                             \
    if (!(cond)) {                                                 \
      fprintf(stderr, "%s:%d: EXPECT(%s)\n", __FILE__, __LINE__, #cond); \
      failed = 1;                                                  \
    }                                                              \
  } while (0)

static void test_registry(void) {
  EXPECT(qns_scenario_count() == 9);
  EXPECT(strcmp(qns_scenario_name(0), "ghz_superposition") == 0);
  EXPECT(qns_scenario_name(9) == NULL);
  EXPECT(qns_scenario_name(-1) == NULL);
  EXPECT(strlen(qns_version()) > 0);
}

static void test_reports(void) {
  qns_options o;
  qns_report* r = NULL;
  qns_default_options(&o);
  EXPECT(o.seed == 1 && o.sweep == 1 && o.sample == 0 && o.reps == 10000);
  o.sweep = 0;

  EXPECT(qns_run_scenario("nonlinearity", &o, &r) == QNS_OK);
  EXPECT(qns_report_passed(r) == 1);
  EXPECT(qns_report_count(r) == 1);
  EXPECT(strcmp(qns_report_scenario(r, 0), "nonlinearity") == 0);
  EXPECT(qns_report_check_count(r, 0) == 3);
  EXPECT(strstr(qns_report_json(r), "\"scenario\": \"nonlinearity\"") != NULL);
  EXPECT(strstr(qns_report_json(r), "wall_time_ms") == NULL);
  qns_report_free(r);

  o.timing = 1;
  EXPECT(qns_run_scenario("addressing", &o, &r) == QNS_OK);
  EXPECT(strstr(qns_report_json(r), "wall_time_ms") != NULL);
  qns_report_free(r);

  r = NULL;
  EXPECT(qns_run_scenario("no_such_scenario", NULL, &r) == QNS_CONFIG);
  EXPECT(r == NULL);
  EXPECT(strstr(qns_last_error(), "no_such_scenario") != NULL);
  EXPECT(strcmp(qns_status_name(QNS_CONFIG), "config") == 0);

  EXPECT(qns_run_topology("{", NULL, &r) == QNS_CONFIG);
  EXPECT(qns_run_scenario(NULL, NULL, &r) == QNS_INVALID_ARGUMENT);
  qns_report_free(NULL);
}

static void test_state(void) {
  const char* labels[] = {"a", "b"};
  const int dims[] = {2, 2};
  const double s = 1.0 / sqrt(2.0);
  /* |Phi+> */
  const double bell[8] = {s, 0, 0, 0, 0, 0, s, 0};
  /* X */
  const double x[8] = {0, 0, 1, 0, 1, 0, 0, 0};
  const char* side[] = {"a"};
  const char* ta[] = {"a"};
  double amps[8];
  double neg = -1, p = -1;
  int outcome = -1;
  qns_state* st = NULL;

  EXPECT(qns_state_new(2, labels, dims, 3, &st) == QNS_OK);
  EXPECT(qns_state_dimension(st) == 4);
  EXPECT(qns_state_register_count(st) == 2);
  EXPECT(qns_state_negativity(st, 1, side, &neg) == QNS_OK);
  EXPECT(fabs(neg) < 1e-12);

  EXPECT(qns_state_set_amplitudes(st, bell, 4) == QNS_OK);
  EXPECT(qns_state_negativity(st, 1, side, &neg) == QNS_OK);
  EXPECT(fabs(neg - 0.5) < 1e-12);
  EXPECT(qns_state_set_amplitudes(st, bell, 3) == QNS_DIMENSION_MISMATCH);

  /* X on a: |Psi+> */
  EXPECT(qns_state_apply(st, 1, ta, x, 2) == QNS_OK);
  EXPECT(qns_state_amplitudes(st, amps, 4) == QNS_OK);
  EXPECT(fabs(amps[2] - s) < 1e-12 && fabs(amps[4] - s) < 1e-12 && fabs(amps[0]) < 1e-12);

  /* non-unitary */
  {
    const double bad[8] = {1, 0, 1, 0, 0, 0, 1, 0};
    EXPECT(qns_state_apply(st, 1, ta, bad, 2) == QNS_NOT_UNITARY);
  }
  {
    const char* ghost[] = {"zz"};
    EXPECT(qns_state_apply(st, 1, ghost, x, 2) == QNS_UNKNOWN_REGISTER);
  }

  EXPECT(qns_state_measure_z(st, "a", 1, &outcome, &p) == QNS_OK);
  EXPECT(outcome == 1 && fabs(p - 0.5) < 1e-12);
  EXPECT(qns_state_register_count(st) == 1);
  EXPECT(qns_state_amplitudes(st, amps, 2) == QNS_OK);
  EXPECT(fabs(amps[0] - 1.0) < 1e-12);
  EXPECT(qns_state_measure_z(st, "b", 1, &outcome, &p) == QNS_ZERO_PROBABILITY);
  qns_state_free(st);

  /* sampled outcomes follow the state's seed: 16 |+> qubits, twice */
  {
    const double h[8] = {s, 0, s, 0, s, 0, -s, 0};
    const char* names[16] = {"q0", "q1", "q2",  "q3",  "q4",  "q5",  "q6",  "q7",
                             "q8", "q9", "q10", "q11", "q12", "q13", "q14", "q15"};
    int dims16[16], bits[2][16], k, i, same = 1, ones = 0;
    for (i = 0; i < 16; ++i) dims16[i] = 2;
    for (k = 0; k < 2; ++k) {
      qns_state* q = NULL;
      EXPECT(qns_state_new(16, names, dims16, 99, &q) == QNS_OK);
      for (i = 0; i < 16; ++i) EXPECT(qns_state_apply(q, 1, &names[i], h, 2) == QNS_OK);
      for (i = 0; i < 16; ++i) {
        EXPECT(qns_state_measure_z(q, names[i], -1, &bits[k][i], &p) == QNS_OK);
        EXPECT(fabs(p - 0.5) < 1e-12);
      }
      qns_state_free(q);
    }
    for (i = 0; i < 16; ++i) {
      same = same && bits[0][i] == bits[1][i];
      ones += bits[0][i];
    }
    EXPECT(same);
    EXPECT(ones > 0 && ones < 16);
  }
}

int main(void) {
  test_registry();
  test_reports();
  test_state();
  if (failed) return 1;
  printf("capi tests passed\n");
  return 0;
}
