// Copyright 2026 The qnetsup Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qnetsup/qnetsup.h"

#include <exception>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "qnetsup/engine.hpp"
#include "qnetsup/entmetrics.hpp"
#include "qnetsup/scenarios.hpp"

using namespace qnetsup;

struct qns_report {
  std::vector<ScenarioReport> reports;
  std::string json;
};

struct qns_state {
  PureState state;
  Rng rng{0};
};

namespace {

thread_local std::string g_last_error;

qns_status fail(qns_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

// Runs fn, mapping exceptions onto status codes.
template <class F>
qns_status guarded(F&& fn) {
  try {
    g_last_error.clear();
    fn();
    return QNS_OK;
  } catch (const Error& e) {
    return fail(static_cast<qns_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return fail(QNS_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(QNS_INTERNAL, e.what());
  }
}

RunOptions convert(const qns_options* o) {
  RunOptions r;
  if (!o) return r;
  r.seed = o->seed;
  r.sample = o->sample != 0;
  r.reps = o->reps;
  r.draws = o->draws;
  r.sweep = o->sweep != 0;
  return r;
}

void need(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, what);
}

std::vector<std::string> strings(int n, const char* const* p) {
  need(n >= 0 && (n == 0 || p), "null string array");
  std::vector<std::string> v;
  for (int i = 0; i < n; ++i) {
    need(p[i] != nullptr, "null string");
    v.emplace_back(p[i]);
  }
  return v;
}

qns_report* single(ScenarioReport r, bool timing) {
  auto out = std::make_unique<qns_report>();
  out->json = r.to_json(timing);
  out->reports.push_back(std::move(r));
  return out.release();
}

bool timing_of(const qns_options* o) { return o && o->timing; }

}  // namespace

extern "C" {

const char* qns_version(void) { return "0.1.0"; }

const char* qns_last_error(void) { return g_last_error.c_str(); }

const char* qns_status_name(qns_status s) {
  if (s == QNS_OK) return "ok";
  if (s == QNS_INTERNAL) return "internal";
  if (s >= 1 && s <= 13) return error_code_name(static_cast<ErrorCode>(static_cast<int>(s)));
  return "unknown";
}

void qns_default_options(qns_options* opts) {
  if (!opts) return;
  RunOptions d;
  opts->seed = d.seed;
  opts->sample = d.sample ? 1 : 0;
  opts->reps = d.reps;
  opts->draws = d.draws;
  opts->sweep = d.sweep ? 1 : 0;
  opts->timing = 0;
}

int qns_scenario_count(void) { return static_cast<int>(scenario_names().size()); }

const char* qns_scenario_name(int i) {
  if (i < 0 || i >= qns_scenario_count()) return nullptr;
  return scenario_names()[static_cast<std::size_t>(i)].c_str();
}

qns_status qns_run_scenario(const char* name, const qns_options* opts, qns_report** out) {
  return guarded([&] {
    need(name && out, "null argument");
    *out = single(run_scenario(name, convert(opts)), timing_of(opts));
  });
}

qns_status qns_run_all(const qns_options* opts, qns_report** out) {
  return guarded([&] {
    need(out != nullptr, "null argument");
    auto rep = std::make_unique<qns_report>();
    const RunOptions ro = convert(opts);
    for (const auto& n : scenario_names()) rep->reports.push_back(run_scenario(n, ro));
    rep->json = reports_to_json(rep->reports, timing_of(opts));
    *out = rep.release();
  });
}

qns_status qns_run_topology(const char* json_text, const qns_options* opts, qns_report** out) {
  return guarded([&] {
    need(json_text && out, "null argument");
    *out = single(run_topology(json_text, convert(opts)), timing_of(opts));
  });
}

const char* qns_report_json(const qns_report* r) { return r ? r->json.c_str() : ""; }

int qns_report_passed(const qns_report* r) {
  if (!r) return 0;
  for (const auto& x : r->reports)
    if (!x.passed()) return 0;
  return 1;
}

int qns_report_count(const qns_report* r) { return r ? static_cast<int>(r->reports.size()) : 0; }

const char* qns_report_scenario(const qns_report* r, int i) {
  if (!r || i < 0 || i >= qns_report_count(r)) return nullptr;
  return r->reports[static_cast<std::size_t>(i)].scenario.c_str();
}

int qns_report_scenario_passed(const qns_report* r, int i) {
  if (!r || i < 0 || i >= qns_report_count(r)) return 0;
  return r->reports[static_cast<std::size_t>(i)].passed() ? 1 : 0;
}

int qns_report_check_count(const qns_report* r, int i) {
  if (!r || i < 0 || i >= qns_report_count(r)) return 0;
  return static_cast<int>(r->reports[static_cast<std::size_t>(i)].checks.size());
}

void qns_report_free(qns_report* r) { delete r; }

qns_status qns_state_new(int n, const char* const* labels, const int* dims, uint64_t seed,
                         qns_state** out) {
  return guarded([&] {
    need(out != nullptr && n > 0 && dims != nullptr, "bad register list");
    auto names = strings(n, labels);
    std::vector<RegisterId> regs;
    for (int i = 0; i < n; ++i) regs.push_back({names[static_cast<std::size_t>(i)], dims[i]});
    auto s = std::make_unique<qns_state>();
    s->state = new_state(regs, std::vector<int>(static_cast<std::size_t>(n), 0));
    s->rng = Rng(seed);
    *out = s.release();
  });
}

void qns_state_free(qns_state* s) { delete s; }

size_t qns_state_dimension(const qns_state* s) { return s ? s->state.size() : 0; }

int qns_state_register_count(const qns_state* s) {
  return s ? static_cast<int>(s->state.registers().size()) : 0;
}

qns_status qns_state_set_amplitudes(qns_state* s, const double* re_im, size_t n) {
  return guarded([&] {
    need(s && re_im, "null argument");
    if (n != s->state.size())
      throw Error(ErrorCode::DimensionMismatch, "amplitude count != state dimension");
    Vector v(static_cast<Eigen::Index>(n));
    for (size_t i = 0; i < n; ++i) v[static_cast<Eigen::Index>(i)] = cplx(re_im[2 * i], re_im[2 * i + 1]);
    s->state = from_amplitudes(s->state.registers(), v);
  });
}

qns_status qns_state_amplitudes(const qns_state* s, double* re_im, size_t n) {
  return guarded([&] {
    need(s && re_im, "null argument");
    if (n != s->state.size())
      throw Error(ErrorCode::DimensionMismatch, "buffer size != state dimension");
    const Vector& a = s->state.amplitudes();
    for (size_t i = 0; i < n; ++i) {
      re_im[2 * i] = a[static_cast<Eigen::Index>(i)].real();
      re_im[2 * i + 1] = a[static_cast<Eigen::Index>(i)].imag();
    }
  });
}

qns_status qns_state_apply(qns_state* s, int n_targets, const char* const* targets,
                           const double* re_im, int dim) {
  return guarded([&] {
    need(s && re_im && dim > 0, "bad argument");
    Matrix u(dim, dim);
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) {
        const std::size_t k = 2 * (static_cast<std::size_t>(r) * dim + c);
        u(r, c) = cplx(re_im[k], re_im[k + 1]);
      }
    apply_unitary_inplace(s->state, strings(n_targets, targets), u);
  });
}

qns_status qns_state_measure_z(qns_state* s, const char* label, int outcome_in, int* outcome,
                               double* probability) {
  return guarded([&] {
    need(s && label, "null argument");
    need(outcome_in >= -1, "outcome must be >= -1");
    Policy p = outcome_in >= 0 ? Policy(PostSelect{outcome_in}) : Policy(Sample{&s->rng, nullptr});
    auto o = z_measure_inplace(s->state, label, p);
    if (outcome) *outcome = o.outcome;
    if (probability) *probability = o.probability;
  });
}

qns_status qns_state_negativity(const qns_state* s, int n_side_a, const char* const* side_a,
                                double* out) {
  return guarded([&] {
    need(s && out, "null argument");
    *out = negativity(to_density(s->state), strings(n_side_a, side_a));
  });
}

}  // extern "C"
