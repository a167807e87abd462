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

#include "oracle.hpp"
#include "qnetsup/engine.hpp"

namespace th {

using namespace qnetsup;

inline std::vector<RegisterId> qubits(const std::vector<std::string>& labels) {
  std::vector<RegisterId> r;
  for (const auto& l : labels) r.push_back({l, 2});
  return r;
}

inline std::vector<int> dims_of(const std::vector<RegisterId>& regs) {
  std::vector<int> d;
  for (const auto& r : regs) d.push_back(r.dim);
  return d;
}

// |<ref|s>|^2 with ref given over `regs` in that order.
inline double fid(const PureState& s, const std::vector<RegisterId>& regs,
                  const Vector& ref) {
  std::vector<std::string> order;
  for (const auto& r : regs) order.push_back(r.label);
  PureState t = reorder(s, order);
  return oracle::overlap2(ref, t.amplitudes());
}

// Graph state amplitudes (-1)^{sum_edges x_a x_b} / 2^{n/2}, positions index
// into `n` qubits.
inline Vector graph_ket(int n, const std::vector<std::pair<int, int>>& edges) {
  Vector v(1L << n);
  for (long x = 0; x < (1L << n); ++x) {
    int par = 0;
    for (auto [a, b] : edges) par ^= ((x >> (n - 1 - a)) & 1) & ((x >> (n - 1 - b)) & 1);
    v[x] = par ? -1.0 : 1.0;
  }
  return v / std::sqrt(static_cast<double>(1L << n));
}

inline Vector qubit(cplx a, cplx b) {
  Vector v(2);
  v << a, b;
  return v;
}

}  // namespace th
