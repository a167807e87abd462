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

#include "qnetsup/entmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "qnetsup/graphstate.hpp"

namespace qnetsup {

namespace {

std::set<std::string> as_set(const std::vector<std::string>& v) {
  return {v.begin(), v.end()};
}

void check_cut(const std::vector<RegisterId>& regs, const Bipartition& cut) {
  auto a = as_set(cut.side_a), b = as_set(cut.side_b);
  if (a.size() != cut.side_a.size() || b.size() != cut.side_b.size())
    throw Error(ErrorCode::DuplicateRegister, "cut lists a register twice");
  for (const auto& x : a)
    if (b.count(x)) throw Error(ErrorCode::InvalidArgument, "cut sides overlap");
  if (a.size() + b.size() != regs.size())
    throw Error(ErrorCode::InvalidArgument, "cut does not cover the registers");
  for (const auto& r : regs)
    if (!a.count(r.label) && !b.count(r.label))
      throw Error(ErrorCode::UnknownRegister, "register '" + r.label +
                                                  "' missing from cut");
}

// Transposing the side that holds the first stored register makes the
// result independent of how the cut was written down.
std::vector<std::string> canonical_side(const std::vector<RegisterId>& regs,
                                        const Bipartition& cut) {
  const auto& first = regs.front().label;
  if (std::find(cut.side_a.begin(), cut.side_a.end(), first) != cut.side_a.end())
    return cut.side_a;
  return cut.side_b;
}

}  // namespace

Bipartition make_cut(const std::vector<std::string>& all,
                     const std::vector<std::string>& side_a) {
  auto a = as_set(side_a);
  Bipartition c{side_a, {}};
  for (const auto& l : all)
    if (!a.count(l)) c.side_b.push_back(l);
  return c;
}

std::vector<Bipartition> all_bipartitions(const std::vector<std::string>& labels) {
  std::vector<Bipartition> out;
  const int n = static_cast<int>(labels.size());
  if (n < 2) return out;
  // first label always on side_a to avoid listing a cut twice
  for (int mask = 0; mask < (1 << (n - 1)); ++mask) {
    Bipartition c;
    c.side_a.push_back(labels[0]);
    for (int i = 1; i < n; ++i)
      ((mask >> (i - 1)) & 1 ? c.side_a : c.side_b).push_back(labels[i]);
    if (c.side_b.empty()) continue;
    out.push_back(c);
  }
  return out;
}

Matrix partial_transpose(const DensityState& rho,
                         const std::vector<std::string>& side_a) {
  const auto& regs = rho.registers;
  const Eigen::Index D = rho.matrix.rows();
  std::vector<char> in_a(regs.size(), 0);
  for (const auto& l : side_a) in_a[rho.position(l)] = 1;
  // A-part offset of each basis index
  std::vector<std::size_t> apart(static_cast<std::size_t>(D), 0);
  std::vector<std::size_t> st(regs.size());
  std::size_t acc = 1;
  for (int i = static_cast<int>(regs.size()) - 1; i >= 0; --i) {
    st[i] = acc;
    acc *= static_cast<std::size_t>(regs[i].dim);
  }
  for (std::size_t x = 0; x < static_cast<std::size_t>(D); ++x) {
    std::size_t a = 0;
    for (std::size_t r = 0; r < regs.size(); ++r)
      if (in_a[r]) a += ((x / st[r]) % regs[r].dim) * st[r];
    apart[x] = a;
  }
  Matrix out(D, D);
  for (Eigen::Index i = 0; i < D; ++i)
    for (Eigen::Index j = 0; j < D; ++j) {
      std::size_t ai = apart[i], aj = apart[j];
      out(i - ai + aj, j - aj + ai) = rho.matrix(i, j);
    }
  return out;
}

std::vector<double> hermitian_eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw Error(ErrorCode::PreconditionFailed, "eigensolver failed");
  std::vector<double> ev(es.eigenvalues().data(),
                         es.eigenvalues().data() + es.eigenvalues().size());
  return ev;
}

double negativity(const DensityState& rho, const Bipartition& cut) {
  check_cut(rho.registers, cut);
  auto ev = hermitian_eigenvalues(partial_transpose(rho, canonical_side(rho.registers, cut)));
  double tn = 0;
  for (double x : ev) tn += std::abs(x);
  return std::max(0.0, (tn - 1.0) / 2.0);
}

double negativity(const DensityState& rho, const std::vector<std::string>& side_a) {
  return negativity(rho, make_cut(rho.labels(), side_a));
}

double min_pt_eigenvalue(const DensityState& rho, const Bipartition& cut) {
  check_cut(rho.registers, cut);
  auto ev = hermitian_eigenvalues(partial_transpose(rho, canonical_side(rho.registers, cut)));
  return *std::min_element(ev.begin(), ev.end());
}

bool is_ppt(const DensityState& rho, const Bipartition& cut, double tol) {
  return min_pt_eigenvalue(rho, cut) >= -tol;
}

double maximal_entanglement_deviation(const PureState& s, const Bipartition& cut) {
  check_cut(s.registers(), cut);
  auto dim_of = [&](const std::vector<std::string>& side) {
    std::size_t d = 1;
    for (const auto& l : side) d *= static_cast<std::size_t>(s.dim(l));
    return d;
  };
  const auto& small = dim_of(cut.side_a) <= dim_of(cut.side_b) ? cut.side_a : cut.side_b;
  DensityState r = partial_trace(s, small);
  const auto D = r.matrix.rows();
  Matrix target = Matrix::Identity(D, D) / static_cast<double>(D);
  return (r.matrix - target).norm();
}

bool maximally_entangled_check(const PureState& s, const Bipartition& cut,
                               double tol) {
  return maximal_entanglement_deviation(s, cut) <= tol;
}

double fidelity(const PureState& a, const PureState& b) {
  return std::norm(inner(a, b));
}

double fidelity(const DensityState& a, const PureState& b) {
  if (a.registers.size() != b.registers().size())
    throw Error(ErrorCode::InvalidArgument, "register sets differ");
  PureState bb = reorder(b, a.labels());
  if (bb.registers() != a.registers)
    throw Error(ErrorCode::DimensionMismatch, "register dims differ");
  const Vector& v = bb.amplitudes();
  return std::real(v.dot(a.matrix * v));
}

void check_density(const DensityState& rho, double tol) {
  const Matrix& m = rho.matrix;
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tol)
    throw Error(ErrorCode::PreconditionFailed, "density matrix not Hermitian");
  if (std::abs(m.trace() - cplx(1.0)) > tol)
    throw Error(ErrorCode::PreconditionFailed, "density matrix trace != 1");
  auto ev = hermitian_eigenvalues(m);
  if (*std::min_element(ev.begin(), ev.end()) < -kPsdFloor)
    throw Error(ErrorCode::PreconditionFailed, "density matrix not PSD");
}

DensityState mixture(const std::vector<std::pair<double, PureState>>& terms) {
  if (terms.empty()) throw Error(ErrorCode::InvalidArgument, "empty mixture");
  DensityState out;
  out.registers = terms.front().second.registers();
  const auto labels = terms.front().second.labels();
  out.matrix = Matrix::Zero(terms.front().second.size(), terms.front().second.size());
  for (const auto& [w, s] : terms) {
    PureState t = reorder(s, labels);
    if (t.registers() != out.registers)
      throw Error(ErrorCode::DimensionMismatch, "mixture terms differ in registers");
    out.matrix += w * t.amplitudes() * t.amplitudes().adjoint();
  }
  return out;
}

DensityState smolin_state(const std::vector<std::string>& labels) {
  if (labels.size() != 4)
    throw Error(ErrorCode::InvalidArgument, "Smolin state has four qubits");
  std::vector<std::pair<double, PureState>> terms;
  std::vector<RegisterId> regs;
  for (const auto& l : labels) regs.push_back({l, 2});
  for (int k = 0; k < 4; ++k) {
    Vector b = gates::bell_vector(2, k >> 1, k & 1);
    Vector v = gates::kron(b, b);
    terms.emplace_back(0.25, PureState(regs, v));
  }
  return mixture(terms);
}

}  // namespace qnetsup
