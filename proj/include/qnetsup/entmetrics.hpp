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

#include <string>
#include <vector>

#include "qnetsup/engine.hpp"

namespace qnetsup {

struct Bipartition {
  std::vector<std::string> side_a;
  std::vector<std::string> side_b;
};

Bipartition make_cut(const std::vector<std::string>& all,
                     const std::vector<std::string>& side_a);
// Every unordered split into two nonempty sides (2^(n-1) - 1 of them).
std::vector<Bipartition> all_bipartitions(const std::vector<std::string>& labels);

Matrix partial_transpose(const DensityState& rho,
                         const std::vector<std::string>& side_a);
std::vector<double> hermitian_eigenvalues(const Matrix& m);

double negativity(const DensityState& rho, const Bipartition& cut);
double negativity(const DensityState& rho, const std::vector<std::string>& side_a);
double min_pt_eigenvalue(const DensityState& rho, const Bipartition& cut);
bool is_ppt(const DensityState& rho, const Bipartition& cut, double tol = 1e-9);

bool maximally_entangled_check(const PureState& s, const Bipartition& cut,
                               double tol = 1e-9);
// Frobenius distance of the smaller side's reduced state from 1/D.
double maximal_entanglement_deviation(const PureState& s, const Bipartition& cut);

double fidelity(const PureState& a, const PureState& b);
double fidelity(const DensityState& a, const PureState& b);

// Validates the DensityState invariants; throws PreconditionFailed.
void check_density(const DensityState& rho, double tol = kAlgebraTol);

DensityState mixture(const std::vector<std::pair<double, PureState>>& terms);
DensityState smolin_state(const std::vector<std::string>& labels = {"1", "2", "3",
                                                                     "4"});

}  // namespace qnetsup
