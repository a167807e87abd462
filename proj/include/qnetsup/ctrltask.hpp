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

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qnetsup/engine.hpp"
#include "qnetsup/graphstate.hpp"

namespace qnetsup {

inline constexpr double kWeightTol = 1e-9;

// Raises WeightDrift if the outcome distribution of `kraus` on `targets`
// differs between populated levels of `control` by more than tol.
void check_weight_preservation(const PureState& s, const std::string& control,
                               const std::vector<std::string>& targets,
                               const std::vector<Matrix>& kraus,
                               double tol = kWeightTol);

struct ControlledMeasureSpec {
  std::string control;
  std::string target;
  std::string aux;
  std::vector<Vector> basis;
  // Known preparation of aux. When present, the measured branch replaces this
  // dummy on the target by the observed basis state.
  std::optional<Vector> dummy;
  int active_level = 1;
};

PureState prepare_aux_for_measurement(const DensityState& rho_a,
                                      const std::vector<Vector>& basis,
                                      const std::string& aux_label = "aux");
Vector aux_vector_for_measurement(const Matrix& rho_a,
                                  const std::vector<Vector>& basis);

MeasurementRecord controlled_measure(PureState& state,
                                     const ControlledMeasureSpec& spec,
                                     const Policy& policy);

// One destination of a controlled send: on control `level` the qubit at a1
// is teleported to b through the pair (a2, b).
struct SendRoute {
  int level = 1;
  std::string a2;
  std::string b;
};

MeasurementRecord controlled_send(PureState& state, const std::string& control,
                                  const std::string& a1, const std::string& a2,
                                  const std::string& b, const std::string& ax1,
                                  const std::string& ax2, const Policy& policy);

MeasurementRecord controlled_send_routes(PureState& state,
                                         const std::string& control,
                                         const std::string& a1,
                                         const std::string& ax1,
                                         const std::string& ax2,
                                         const std::vector<SendRoute>& routes,
                                         const Policy& policy);

// `g` is classical side information for the corrections; it is not edited.
MeasurementRecord controlled_cut(PureState& state, const Graph& g,
                                 const std::string& control, const std::string& a,
                                 const std::string& aux, const Policy& policy);

MeasurementRecord controlled_merge(PureState& state, const std::string& control,
                                   const Graph& g, const std::string& a1,
                                   const std::string& a2, const std::string& aux,
                                   const Policy& policy);

void apply_extra_level(PureState& state, const std::string& control,
                       int control_level, const std::string& target);

struct NonlinearityReport {
  DensityState rho_decomp_zx;
  DensityState rho_decomp_pm;
  double trace_distance = 0.0;
};

NonlinearityReport demonstrate_measurement_nonlinearity();

}  // namespace qnetsup
